#include "cpds/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpds/errors.hpp"
#include "cpds/rng.hpp"

namespace cpds {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

double hausdorff_interval(const IntervalSet& a, const IntervalSet& b) {
  if (!(a.lo <= a.hi) || !(b.lo <= b.hi))
    throw PreconditionError("hausdorff_interval needs valid intervals");
  return std::max(std::fabs(a.lo - b.lo), std::fabs(a.hi - b.hi));
}

std::string Probe::describe() const {
  std::ostringstream os;
  if (kind == Kind::interval)
    os << "interval[" << lo << ", " << hi << "]";
  else
    os << "point(" << x << ", " << y << ")";
  return os.str();
}

namespace {

bool monotone_to_target(const std::vector<double>& errs, const PassRule& rule) {
  for (std::size_t k = 1; k < errs.size(); ++k)
    if (errs[k] > errs[k - 1] + rule.slack) return false;
  return !errs.empty() && errs.back() < rule.final_threshold;
}

bool interval_hits(const IntervalSet& a, const Probe& p) {
  return a.lo <= p.hi && p.lo <= a.hi;
}

void check_probe_boundary(const IntervalSet& truth, const Probe& p) {
  if (p.kind != Probe::Kind::interval)
    throw ConfigError("interval scenarios need interval probes");
  if (!(p.lo <= p.hi)) throw PreconditionError("probe interval has lo > hi");
  // bd(truth) = {truth.lo, truth.hi}; a valid probe avoids both.
  if ((p.lo <= truth.lo && truth.lo <= p.hi) ||
      (p.lo <= truth.hi && truth.hi <= p.hi))
    throw PreconditionError("probe " + p.describe() +
                            " touches the boundary of the truth set");
}

}  // namespace

SeriesResult check_hausdorff_consistency(const IntervalDrawsByN& draws_by_n, const IntervalSet& truth,
                        double eps, const PassRule& rule) {
  if (draws_by_n.size() < 2)
    throw PreconditionError("consistency check needs at least two sample sizes");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  SeriesResult res;
  for (const auto& [n, draws] : draws_by_n) {
    std::size_t exceed = 0;
    for (const auto& d : draws)
      if (hausdorff_interval(d, truth) > eps) ++exceed;
    res.sample_sizes.push_back(n);
    res.values.push_back(draws.empty()
                             ? 0.0
                             : static_cast<double>(exceed) /
                                   static_cast<double>(draws.size()));
  }
  res.pass = monotone_to_target(res.values, rule);
  return res;
}

std::vector<HittingProbeResult> check_hitting_consistency(const IntervalDrawsByN& draws_by_n,
                                        const IntervalSet& truth,
                                        const std::vector<Probe>& probes,
                                        const PassRule& rule) {
  if (draws_by_n.size() < 2)
    throw PreconditionError("consistency check needs at least two sample sizes");
  std::vector<HittingProbeResult> out;
  for (const auto& probe : probes) {
    check_probe_boundary(truth, probe);
    HittingProbeResult r;
    r.probe = probe.describe();
    r.target = interval_hits(truth, probe) ? 1 : 0;
    std::vector<double> errs;
    for (const auto& [n, draws] : draws_by_n) {
      std::size_t hit = 0;
      for (const auto& d : draws)
        if (interval_hits(d, probe)) ++hit;
      double frac = draws.empty() ? 0.0
                                  : static_cast<double>(hit) /
                                        static_cast<double>(draws.size());
      r.series.sample_sizes.push_back(n);
      r.series.values.push_back(frac);
      errs.push_back(std::fabs(frac - static_cast<double>(r.target)));
    }
    r.series.pass = monotone_to_target(errs, rule);
    out.push_back(std::move(r));
  }
  return out;
}

EquivalenceResult check_equivalence(const IntervalDrawsByN& draws_by_n,
                                    const IntervalSet& truth,
                                    const std::vector<double>& eps_grid,
                                    const std::vector<Probe>& probes,
                                    const PassRule& rule) {
  EquivalenceResult res;
  res.hausdorff_pass = true;
  for (double eps : eps_grid) {
    SeriesResult s = check_hausdorff_consistency(draws_by_n, truth, eps, rule);
    res.hausdorff_pass = res.hausdorff_pass && s.pass;
    res.hausdorff.emplace_back(eps, std::move(s));
  }
  res.hitting = check_hitting_consistency(draws_by_n, truth, probes, rule);
  res.hitting_pass = true;
  for (const auto& r : res.hitting) res.hitting_pass = res.hitting_pass && r.series.pass;
  res.agree = res.hitting_pass == res.hausdorff_pass;
  return res;
}

bool polar_ribbon_contains(const PolarBox& box, double x, double y) {
  double r = std::hypot(x, y);
  if (r < box.r_lo || r > box.r_hi) return false;
  double ang = std::atan2(y, x);
  if (ang < 0.0) ang += kTwoPi;
  return ang >= box.ang_lo && ang <= box.ang_hi;
}

double hausdorff_polar_ribbon_vs_disk(const PolarBox& box) {
  // Ribbon {r in [r_lo, 1], angle in [a, 2*pi - a]} sits inside the disk, so
  // only the directed distance disk -> ribbon matters. The extremes are the
  // origin (distance r_lo) and the rim point at angle 0, whose nearest ribbon
  // point is the rim point at angle a (chord 2*sin(a/2)).
  if (box.r_hi != 1.0 || std::fabs(box.ang_hi - (kTwoPi - box.ang_lo)) > 1e-12)
    throw PreconditionError("hausdorff formula expects the symmetric ribbon family");
  double a = std::min(box.ang_lo, kTwoPi / 2.0);
  return std::max(box.r_lo, 2.0 * std::sin(a / 2.0));
}

Scenario::Kind scenario_kind_from_string(const std::string& s) {
  if (s == "interval_noise") return Scenario::Kind::interval_noise;
  if (s == "fixed_noise") return Scenario::Kind::fixed_noise;
  if (s == "mapped_grid") return Scenario::Kind::mapped_grid;
  if (s == "polar_ribbon") return Scenario::Kind::polar_ribbon;
  throw ConfigError("unknown scenario kind '" + s + "'");
}

const char* scenario_kind_name(Scenario::Kind k) {
  switch (k) {
    case Scenario::Kind::interval_noise: return "interval_noise";
    case Scenario::Kind::fixed_noise: return "fixed_noise";
    case Scenario::Kind::mapped_grid: return "mapped_grid";
    case Scenario::Kind::polar_ribbon: return "polar_ribbon";
  }
  return "?";
}

IntervalDrawsByN generate_interval_draws(const Scenario& scenario) {
  IntervalDrawsByN by_n;
  for (std::uint64_t n : scenario.sample_sizes) {
    double scale = scenario.kind == Scenario::Kind::fixed_noise
                       ? scenario.noise_scale
                       : scenario.noise_scale / std::sqrt(static_cast<double>(n));
    std::vector<IntervalSet> draws;
    draws.reserve(scenario.replications);
    for (std::size_t j = 0; j < scenario.replications; ++j) {
      double lo = scenario.truth.lo +
                  scale * rng::normal_sample(scenario.seed ^ n, j, 0, 0, 1);
      double hi = scenario.truth.hi +
                  scale * rng::normal_sample(scenario.seed ^ n, j, 1, 0, 1);
      if (lo > hi) std::swap(lo, hi);
      draws.push_back({lo, hi});
    }
    by_n.emplace(n, std::move(draws));
  }
  return by_n;
}

namespace {

// Draws for the mapped scenario: perturbed theta boxes intersected with a fine
// grid, pushed through a monotone map via population_bounds.
IntervalDrawsByN mapped_draws(const Scenario& sc, IntervalSet* mapped_truth) {
  ThetaGrid grid;
  const double margin = 1.0;
  const double lo = sc.truth.lo - margin, hi = sc.truth.hi + margin;
  const std::size_t points = std::max<std::size_t>(sc.grid_points, 3);
  for (std::size_t k = 0; k < points; ++k) {
    double t = lo + (hi - lo) * static_cast<double>(k) /
                        static_cast<double>(points - 1);
    grid.nodes.push_back({t});
  }
  auto q = [&](double t) { return 1.0 / (1.0 + std::exp(-sc.map_scale * t)); };
  QuantityProfile profile;
  profile.per_node.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double v = q(grid.nodes[k][0]);
    profile.per_node[k].e_inf = v;
    profile.per_node[k].e_sup = v;
  }
  ThetaBox truth_box{{sc.truth.lo}, {sc.truth.hi}};
  IdentifiedSetDraw truth_nodes = grid_nodes_in_box(grid, truth_box);
  QuantityInterval t =
      population_bounds(profile, truth_nodes, Quantity::outcome_bounds);
  *mapped_truth = {t.lo, t.hi};

  IntervalDrawsByN by_n;
  for (std::uint64_t n : sc.sample_sizes) {
    auto draws = synthetic_posterior(truth_box, n, sc.replications, sc.seed, grid,
                                     sc.noise_scale);
    std::vector<IntervalSet> intervals;
    intervals.reserve(draws.size());
    for (const auto& d : draws) {
      QuantityInterval iv = population_bounds(profile, d, Quantity::outcome_bounds);
      intervals.push_back({iv.lo, iv.hi});
    }
    by_n.emplace(n, std::move(intervals));
  }
  return by_n;
}

ScenarioResult run_polar(const Scenario& sc) {
  ScenarioResult res;
  res.name = sc.name;
  res.kind = scenario_kind_name(sc.kind);
  std::vector<PolarBox> boxes;
  for (std::uint64_t n : sc.sample_sizes) {
    double a = 1.0 / static_cast<double>(n);
    boxes.push_back({a, 1.0, a, kTwoPi - a});
  }
  for (double eps : sc.eps_grid) {
    SeriesResult s;
    std::vector<double> errs;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      double frac =
          hausdorff_polar_ribbon_vs_disk(boxes[k]) > eps ? 1.0 : 0.0;
      s.sample_sizes.push_back(sc.sample_sizes[k]);
      s.values.push_back(frac);
      errs.push_back(frac);
    }
    s.pass = monotone_to_target(errs, sc.rule);
    res.hausdorff.emplace_back(eps, s);
  }
  for (const auto& probe : sc.probes) {
    if (probe.kind != Probe::Kind::point2)
      throw ConfigError("polar scenarios need point probes");
    double norm = std::hypot(probe.x, probe.y);
    if (std::fabs(norm - 1.0) <= 1e-12)
      throw PreconditionError("probe " + probe.describe() +
                              " touches the boundary of the unit disk");
    HittingProbeResult r;
    r.probe = probe.describe();
    r.target = norm <= 1.0 ? 1 : 0;
    std::vector<double> errs;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      double frac = polar_ribbon_contains(boxes[k], probe.x, probe.y) ? 1.0 : 0.0;
      r.series.sample_sizes.push_back(sc.sample_sizes[k]);
      r.series.values.push_back(frac);
      errs.push_back(std::fabs(frac - static_cast<double>(r.target)));
    }
    r.series.pass = monotone_to_target(errs, sc.rule);
    res.hitting.push_back(std::move(r));
  }
  res.hausdorff_pass = true;
  for (const auto& [eps, s] : res.hausdorff) res.hausdorff_pass = res.hausdorff_pass && s.pass;
  res.hitting_pass = true;
  for (const auto& r : res.hitting) res.hitting_pass = res.hitting_pass && r.series.pass;
  res.agree = res.hitting_pass == res.hausdorff_pass;
  return res;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario) {
  if (scenario.sample_sizes.size() < 2)
    throw ConfigError("scenario needs at least two sample sizes");
  if (scenario.kind == Scenario::Kind::polar_ribbon) return run_polar(scenario);

  IntervalSet truth = scenario.truth;
  IntervalDrawsByN draws;
  if (scenario.kind == Scenario::Kind::mapped_grid)
    draws = mapped_draws(scenario, &truth);
  else
    draws = generate_interval_draws(scenario);

  EquivalenceResult eq =
      check_equivalence(draws, truth, scenario.eps_grid, scenario.probes,
                        scenario.rule);
  ScenarioResult res;
  res.name = scenario.name;
  res.kind = scenario_kind_name(scenario.kind);
  res.hausdorff = std::move(eq.hausdorff);
  res.hitting = std::move(eq.hitting);
  res.hausdorff_pass = eq.hausdorff_pass;
  res.hitting_pass = eq.hitting_pass;
  res.agree = eq.agree;
  return res;
}

ConsistencyReport run_scenarios(const std::vector<Scenario>& scenarios) {
  ConsistencyReport report;
  for (const auto& sc : scenarios) report.scenarios.push_back(run_scenario(sc));
  return report;
}

}  // namespace cpds
