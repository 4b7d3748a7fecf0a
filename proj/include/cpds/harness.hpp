#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpds/identify.hpp"

namespace cpds {

struct IntervalSet {
  double lo = 0.0;
  double hi = 0.0;
};

// Hausdorff distance between closed intervals: the larger endpoint gap.
double hausdorff_interval(const IntervalSet& a, const IntervalSet& b);

// Closed probe set: a 1-d interval, or a 2-d point for the polar scenario.
struct Probe {
  enum class Kind { interval, point2 };
  Kind kind = Kind::interval;
  double lo = 0.0, hi = 0.0;  // interval
  double x = 0.0, y = 0.0;    // point2

  std::string describe() const;
};

// Engineering pass thresholds: the theory gives limits, not rates, so the
// harness pins a final-sample bound plus a monotonicity slack.
struct PassRule {
  double final_threshold = 0.05;
  double slack = 0.02;
};

struct SeriesResult {
  std::vector<std::uint64_t> sample_sizes;
  std::vector<double> values;  // one per N
  bool pass = false;
};

using IntervalDrawsByN = std::map<std::uint64_t, std::vector<IntervalSet>>;

// Posterior consistency in Hausdorff distance: the per-N fraction of draws
// with d_H(draw, truth) > eps must shrink below the threshold.
SeriesResult check_hausdorff_consistency(const IntervalDrawsByN& draws_by_n, const IntervalSet& truth,
                        double eps, const PassRule& rule = {});

struct HittingProbeResult {
  std::string probe;
  int target = 0;  // 1[truth hits probe]
  SeriesResult series;
};

// Hitting-probability consistency: the empirical posterior probability of
// draw-meets-probe must converge to the truth indicator. Probes touching the
// boundary of the truth set are rejected.
std::vector<HittingProbeResult> check_hitting_consistency(const IntervalDrawsByN& draws_by_n,
                                        const IntervalSet& truth,
                                        const std::vector<Probe>& probes,
                                        const PassRule& rule = {});

struct EquivalenceResult {
  bool hausdorff_pass = false;
  bool hitting_pass = false;
  bool agree = false;
  std::vector<std::pair<double, SeriesResult>> hausdorff;  // per eps
  std::vector<HittingProbeResult> hitting;
};

// Runs both checks and reports whether they agree; on interval truths the two
// notions must coincide.
EquivalenceResult check_equivalence(const IntervalDrawsByN& draws_by_n,
                                    const IntervalSet& truth,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<Probe>& probes,
                                    const PassRule& rule = {});

// Annulus sector in the plane: radius range cross angle range (radians, angle
// measured in [0, 2*pi)). The image of a box under the polar map.
struct PolarBox {
  double r_lo = 0.0, r_hi = 1.0;
  double ang_lo = 0.0, ang_hi = 0.0;
};

bool polar_ribbon_contains(const PolarBox& box, double x, double y);
// Hausdorff distance between the ribbon {r in [r_lo, 1], angle in
// [ang_lo, 2*pi - ang_lo]} and the closed unit disk.
double hausdorff_polar_ribbon_vs_disk(const PolarBox& box);

struct Scenario {
  enum class Kind { interval_noise, fixed_noise, mapped_grid, polar_ribbon };
  std::string name;
  Kind kind = Kind::interval_noise;
  IntervalSet truth{0.2, 0.8};
  double noise_scale = 1.0;  // c in c/sqrt(N); absolute scale for fixed_noise
  std::vector<std::uint64_t> sample_sizes{100, 10000, 1000000};
  std::size_t replications = 2000;  // J
  std::uint64_t seed = 1;
  std::vector<double> eps_grid{0.05};
  std::vector<Probe> probes;
  // mapped_grid: theta draws are pushed through q(theta) =
  // 1 / (1 + exp(-map_scale * theta)) evaluated on a fine grid via
  // population_bounds.
  std::size_t grid_points = 201;
  double map_scale = 1.0;
  PassRule rule;
};

Scenario::Kind scenario_kind_from_string(const std::string& s);
const char* scenario_kind_name(Scenario::Kind k);

struct ScenarioResult {
  std::string name;
  std::string kind;
  std::vector<std::pair<double, SeriesResult>> hausdorff;
  std::vector<HittingProbeResult> hitting;
  bool hausdorff_pass = false;
  bool hitting_pass = false;
  bool agree = false;
};

struct ConsistencyReport {
  std::vector<ScenarioResult> scenarios;
};

// Interval draws for the noise scenarios (also used to build the mapped ones).
IntervalDrawsByN generate_interval_draws(const Scenario& scenario);

ScenarioResult run_scenario(const Scenario& scenario);
ConsistencyReport run_scenarios(const std::vector<Scenario>& scenarios);

}  // namespace cpds
