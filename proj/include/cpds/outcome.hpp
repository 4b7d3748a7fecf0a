#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpds/concepts.hpp"
#include "cpds/game.hpp"
#include "cpds/solution.hpp"

namespace cpds {

// Outcome of interest, always reducible to an affine functional of the joint
// distribution (coefficients may depend on the utility draw, as for welfare).
struct OutcomeSpec {
  enum class Kind { event_probability, expected_entrants, welfare, custom_affine };

  Kind kind = Kind::expected_entrants;
  std::vector<std::size_t> event_profiles;     // event_probability
  std::vector<double> welfare_weights;         // welfare, one per player
  std::function<LinearFunctional(const Game&)> affine_builder;  // custom_affine
  std::string name;

  static OutcomeSpec expected_entrants();
  static OutcomeSpec event(std::vector<std::size_t> profiles);
  static OutcomeSpec min_entrants_event(const ActionSpace& actions, std::size_t k);
  static OutcomeSpec welfare(std::vector<double> weights);
  static OutcomeSpec affine(std::vector<double> coeffs, double constant = 0.0);
};

// Closed interval in outcome space; endpoints may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Event set B: either closed scalar intervals in outcome space or a union of
// polyhedra over profile probabilities.
struct EventSet {
  std::variant<std::vector<Interval>, RegionUnion> rep;

  bool scalar() const { return std::holds_alternative<std::vector<Interval>>(rep); }
  const std::vector<Interval>& intervals() const {
    return std::get<std::vector<Interval>>(rep);
  }
  const RegionUnion& regions() const { return std::get<RegionUnion>(rep); }
  void validate() const;
};

struct DrawOutcome {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> could;
  std::optional<Tribool> must;
};

LinearFunctional outcome_functional(const OutcomeSpec& spec, const Game& game);

// Solution set of the game under the requested concept.
SolutionSet solve_concept(const Game& game, Concept solution_concept);

// [lo, hi] of the outcome functional over co S(u). Throws EmptinessError when
// the concept has no solution at this draw.
DrawOutcome draw_bounds(const Game& game, Concept solution_concept, const OutcomeSpec& spec);
DrawOutcome draw_bounds_on(const SolutionSet& set, const Game& game,
                           const OutcomeSpec& spec);

// Could/must indicators against B. Scalar mode is an exact interval check of
// [lo, hi]; region mode delegates to intersects / subset_of. Indeterminate
// must answers are propagated, never coerced.
DrawOutcome draw_events(const Game& game, Concept solution_concept, const EventSet& events,
                        const OutcomeSpec* scalar_spec);
DrawOutcome draw_events_on(const SolutionSet& set, const Game& game,
                           const EventSet& events, const OutcomeSpec* scalar_spec);

// Fill could/must on an already-computed outcome. Scalar event sets test the
// stored [lo, hi]; region event sets query the solution set.
void apply_events_on(const SolutionSet& set, DrawOutcome& outcome,
                     const EventSet& events);

}  // namespace cpds
