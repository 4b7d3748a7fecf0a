#include "cpds/outcome.hpp"

#include <algorithm>
#include <cmath>

#include "cpds/errors.hpp"

namespace cpds {

OutcomeSpec OutcomeSpec::expected_entrants() {
  OutcomeSpec s;
  s.kind = Kind::expected_entrants;
  s.name = "expected_entrants";
  return s;
}

OutcomeSpec OutcomeSpec::event(std::vector<std::size_t> profiles) {
  OutcomeSpec s;
  s.kind = Kind::event_probability;
  s.event_profiles = std::move(profiles);
  s.name = "event_probability";
  return s;
}

OutcomeSpec OutcomeSpec::min_entrants_event(const ActionSpace& actions, std::size_t k) {
  std::vector<std::size_t> profiles;
  for (std::size_t p = 0; p < actions.num_profiles(); ++p)
    if (entrant_count(actions, p) >= k) profiles.push_back(p);
  OutcomeSpec s = event(std::move(profiles));
  s.name = "p_at_least_" + std::to_string(k) + "_entrants";
  return s;
}

OutcomeSpec OutcomeSpec::welfare(std::vector<double> weights) {
  OutcomeSpec s;
  s.kind = Kind::welfare;
  s.welfare_weights = std::move(weights);
  s.name = "welfare";
  return s;
}

OutcomeSpec OutcomeSpec::affine(std::vector<double> coeffs, double constant) {
  OutcomeSpec s;
  s.kind = Kind::custom_affine;
  s.affine_builder = [coeffs = std::move(coeffs), constant](const Game& g) {
    if (coeffs.size() != g.actions.num_profiles())
      throw DimensionError("affine outcome coefficient count != profile count");
    return LinearFunctional{coeffs, constant};
  };
  s.name = "affine";
  return s;
}

void EventSet::validate() const {
  if (scalar()) {
    for (const auto& iv : intervals())
      if (!(iv.lo <= iv.hi)) throw ConfigError("event interval has lo > hi");
  } else {
    if (regions().empty()) throw ConfigError("event region union is empty");
  }
}

LinearFunctional outcome_functional(const OutcomeSpec& spec, const Game& game) {
  const std::size_t profiles = game.actions.num_profiles();
  LinearFunctional f;
  f.coeffs.assign(profiles, 0.0);
  switch (spec.kind) {
    case OutcomeSpec::Kind::event_probability:
      for (std::size_t p : spec.event_profiles) {
        if (p >= profiles) throw DimensionError("event profile index out of range");
        f.coeffs[p] = 1.0;
      }
      break;
    case OutcomeSpec::Kind::expected_entrants:
      for (std::size_t p = 0; p < profiles; ++p)
        f.coeffs[p] = static_cast<double>(entrant_count(game.actions, p));
      break;
    case OutcomeSpec::Kind::welfare: {
      if (spec.welfare_weights.size() != game.actions.num_players())
        throw DimensionError("welfare weight count != player count");
      for (std::size_t p = 0; p < profiles; ++p) {
        double v = 0.0;
        for (std::size_t i = 0; i < spec.welfare_weights.size(); ++i)
          v += spec.welfare_weights[i] * game.utility[i][p];
        f.coeffs[p] = v;
      }
      break;
    }
    case OutcomeSpec::Kind::custom_affine:
      if (!spec.affine_builder) throw ConfigError("custom affine outcome has no builder");
      return spec.affine_builder(game);
  }
  return f;
}

SolutionSet solve_concept(const Game& game, Concept solution_concept) {
  switch (solution_concept) {
    case Concept::psne: return enumerate_psne(game);
    case Concept::mixed2x2: return solve_mixed_ne_2x2(game);
    case Concept::ce: return ce_constraints(game);
  }
  throw ConfigError("unknown concept");
}

DrawOutcome draw_bounds(const Game& game, Concept solution_concept, const OutcomeSpec& spec) {
  return draw_bounds_on(solve_concept(game, solution_concept), game, spec);
}

DrawOutcome draw_bounds_on(const SolutionSet& set, const Game& game,
                           const OutcomeSpec& spec) {
  LinearFunctional f = outcome_functional(spec, game);
  DrawOutcome out;
  out.hi = maximize_over(set, f, Direction::maximize).value;
  out.lo = maximize_over(set, f, Direction::minimize).value;
  return out;
}

namespace {

bool intervals_overlap(double lo, double hi, const std::vector<Interval>& set) {
  for (const auto& iv : set)
    if (lo <= iv.hi && iv.lo <= hi) return true;
  return false;
}

// Exact closed-interval cover: is [lo, hi] contained in the union?
bool intervals_cover(double lo, double hi, std::vector<Interval> set) {
  std::sort(set.begin(), set.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double covered_to = lo;
  bool started = false;
  for (const auto& iv : set) {
    if (iv.hi < lo) continue;
    if (!started) {
      if (iv.lo > lo) return false;
      covered_to = iv.hi;
      started = true;
    } else {
      if (iv.lo > covered_to) return false;  // gap (closed intervals: touching is fine)
      covered_to = std::max(covered_to, iv.hi);
    }
    if (covered_to >= hi) return true;
  }
  return started && covered_to >= hi;
}

}  // namespace

DrawOutcome draw_events(const Game& game, Concept solution_concept, const EventSet& events,
                        const OutcomeSpec* scalar_spec) {
  return draw_events_on(solve_concept(game, solution_concept), game, events, scalar_spec);
}

DrawOutcome draw_events_on(const SolutionSet& set, const Game& game,
                           const EventSet& events, const OutcomeSpec* scalar_spec) {
  events.validate();
  DrawOutcome out;
  if (events.scalar()) {
    if (scalar_spec == nullptr)
      throw ConfigError("scalar event set needs an affine scalar outcome");
    DrawOutcome bounds = draw_bounds_on(set, game, *scalar_spec);
    out.lo = bounds.lo;
    out.hi = bounds.hi;
  }
  apply_events_on(set, out, events);
  return out;
}

void apply_events_on(const SolutionSet& set, DrawOutcome& outcome,
                     const EventSet& events) {
  events.validate();
  if (events.scalar()) {
    if (std::isnan(outcome.lo) || std::isnan(outcome.hi))
      throw ConfigError("scalar event set needs computed outcome bounds");
    outcome.could = intervals_overlap(outcome.lo, outcome.hi, events.intervals());
    outcome.must = intervals_cover(outcome.lo, outcome.hi, events.intervals())
                       ? Tribool::yes
                       : Tribool::no;
  } else {
    const RegionUnion& regions = events.regions();
    bool could = false;
    for (const auto& r : regions)
      if (intersects(set, r)) {
        could = true;
        break;
      }
    outcome.could = could;
    outcome.must = could ? subset_of(set, regions) : Tribool::no;
  }
}

}  // namespace cpds
