#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cpds/distribution.hpp"
#include "cpds/game.hpp"
#include "cpds/outcome.hpp"

namespace cpds {

// The complete specification of one counterfactual analysis: decision makers,
// action space, utility map, distribution of utility determinants, solution
// concept, outcome of interest, and (optionally) an event set.
struct CounterfactualSpec {
  std::size_t players = 0;
  ActionSpace actions;
  std::optional<UtilityMap> utility;  // may be omitted with a discrete support
  UtilityDistribution dist = DegenerateDist{};
  Concept solution_concept = Concept::mixed2x2;
  OutcomeSpec outcome;
  std::optional<EventSet> events;

  void validate() const;
  std::size_t theta_dim() const;
  std::vector<double> default_theta() const;
  std::vector<std::string> theta_names() const;
};

// One reported quantity: an outcome functional plus an optional event set.
struct ColumnSpec {
  std::string name;
  OutcomeSpec outcome;
  std::optional<EventSet> events;
};

struct PartialCpds {
  double e_sup = std::numeric_limits<double>::quiet_NaN();
  double e_inf = std::numeric_limits<double>::quiet_NaN();
  double p_could = std::numeric_limits<double>::quiet_NaN();
  double p_must = std::numeric_limits<double>::quiet_NaN();
  double p_cannot = std::numeric_limits<double>::quiet_NaN();
  double se_e_sup = 0, se_e_inf = 0, se_p_could = 0, se_p_must = 0, se_p_cannot = 0;
  std::uint64_t n_draws = 0;
  std::uint64_t excluded_draws = 0;
  std::uint64_t indeterminate_draws = 0;
  double exclusion_rate = 0.0;
  std::uint32_t partitions = 1;
  bool exact = false;
  bool lookup_coverage_warning = false;
};

// Grid over the free utility coordinates (entries where the player's own
// action is nonzero; the rest are fixed at zero by the entry normalization).
struct UGridLattice {
  std::vector<std::vector<double>> axes;  // sorted ascending per coordinate
};

struct UGrid {
  std::variant<UGridLattice, std::vector<std::vector<double>>> rep;

  std::size_t dim() const;
  std::size_t num_nodes() const;
  std::vector<double> node(std::size_t id) const;
  // L-infinity nearest node; exact ties resolve to the lowest node id.
  std::size_t nearest(std::span<const double> point) const;
  std::pair<double, double> hull(std::size_t d) const;
};

// Free coordinate layout: player-major, profile ascending.
std::vector<std::pair<std::size_t, std::size_t>> free_coordinate_slots(
    const ActionSpace& actions);
std::vector<double> free_coordinates(const Game& game);
Game game_from_free_coordinates(const ActionSpace& actions,
                                std::span<const double> coords);

// Precomputed per-node outcomes for the grid-lookup mode.
struct LookupTable {
  UGrid grid;
  std::vector<ColumnSpec> columns;
  // per column, per node
  std::vector<std::vector<DrawOutcome>> outcomes;
  std::vector<char> empty_solution;  // per node
};

struct EngineOptions {
  bool exact = false;        // DiscreteSupport only: exact weighted aggregation
  bool record_empty = false; // exclude empty-solution draws instead of failing
  std::uint32_t partitions = 64;
  bool parallel = true;
  const LookupTable* lookup = nullptr;
};

// Utility template and distribution resolved at a specific theta.
struct ResolvedDraws {
  enum class Mode { discrete, parametric, degenerate };
  Mode mode = Mode::degenerate;
  const DiscreteSupport* support = nullptr;
  std::vector<double> probs;  // support weights after theta binding
  std::vector<double> cdf;
  LinearEntryGameParams params;
  ParametricDist pdist;
  Game fixed_game;
  std::size_t covariates = 0;

  std::size_t support_index(std::uint64_t draw, std::uint64_t seed) const;
  void game_into(std::uint64_t draw, std::uint64_t seed, Game& out,
                 LinearEntryGameParams& scratch) const;
};

ResolvedDraws resolve_at_theta(const CounterfactualSpec& spec,
                               std::span<const double> theta);

// One utility draw from the stream; deterministic in (seed, draw index).
Game utility_draw(const CounterfactualSpec& spec, std::span<const double> theta,
                  std::uint64_t index, std::uint64_t seed);
std::vector<Game> draw_utilities(const CounterfactualSpec& spec,
                                 std::span<const double> theta, std::uint64_t n,
                                 std::uint64_t seed);
// Exact-mode stream: the support points with their weights.
std::vector<std::pair<Game, double>> exact_support(const CounterfactualSpec& spec,
                                                   std::span<const double> theta);

PartialCpds partial_cpds(const CounterfactualSpec& spec, std::span<const double> theta,
                         std::uint64_t n, std::uint64_t seed,
                         const EngineOptions& opts = {});
std::vector<PartialCpds> partial_cpds_multi(const CounterfactualSpec& spec,
                                            std::span<const ColumnSpec> columns,
                                            std::span<const double> theta,
                                            std::uint64_t n, std::uint64_t seed,
                                            const EngineOptions& opts = {});

// Straight-line single-pass reference implementation; the parallel kernel with
// one partition must reproduce it bit for bit.
PartialCpds partial_cpds_serial(const CounterfactualSpec& spec,
                                std::span<const double> theta, std::uint64_t n,
                                std::uint64_t seed, const EngineOptions& opts = {});
std::vector<PartialCpds> partial_cpds_multi_serial(
    const CounterfactualSpec& spec, std::span<const ColumnSpec> columns,
    std::span<const double> theta, std::uint64_t n, std::uint64_t seed,
    const EngineOptions& opts = {});

// Per-theta results with common random numbers across theta values.
std::vector<PartialCpds> sweep(const CounterfactualSpec& spec,
                               const std::vector<std::vector<double>>& thetas,
                               std::uint64_t n, std::uint64_t seed,
                               const EngineOptions& opts = {});
std::vector<std::vector<PartialCpds>> sweep_multi(
    const CounterfactualSpec& spec, std::span<const ColumnSpec> columns,
    const std::vector<std::vector<double>>& thetas, std::uint64_t n,
    std::uint64_t seed, const EngineOptions& opts = {});

LookupTable precompute_grid(const CounterfactualSpec& spec, UGrid grid);
LookupTable precompute_grid(const CounterfactualSpec& spec, UGrid grid,
                            std::span<const ColumnSpec> columns, bool parallel = true);

}  // namespace cpds
