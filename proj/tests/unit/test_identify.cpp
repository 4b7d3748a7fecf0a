#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cpds/engine.hpp"
#include "cpds/errors.hpp"
#include "cpds/harness.hpp"
#include "cpds/identify.hpp"
#include "spec_builders.hpp"

using namespace cpds;
using namespace cpds::testing;

namespace {

PartialCpds node_result(double e_inf, double e_sup, double p_must = 0.2,
                        double p_could = 0.8) {
  PartialCpds r;
  r.e_inf = e_inf;
  r.e_sup = e_sup;
  r.p_must = p_must;
  r.p_could = p_could;
  r.p_cannot = 1 - p_could;
  return r;
}

ThetaGrid line_grid(double lo, double hi, std::size_t points) {
  ThetaGrid g;
  for (std::size_t k = 0; k < points; ++k)
    g.nodes.push_back(
        {lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1)});
  return g;
}

// Independent re-derivation of population_bounds by plain scanning.
QuantityInterval scan_bounds(const QuantityProfile& profile,
                             const IdentifiedSetDraw& draw, Quantity q) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t id : draw.node_ids) {
    const PartialCpds& r = profile.per_node[id];
    double l, h;
    switch (q) {
      case Quantity::outcome_bounds: l = r.e_inf; h = r.e_sup; break;
      case Quantity::event_probability: l = r.p_must; h = r.p_could; break;
      case Quantity::e_sup: l = h = r.e_sup; break;
      case Quantity::e_inf: l = h = r.e_inf; break;
      case Quantity::p_could: l = h = r.p_could; break;
      case Quantity::p_must: l = h = r.p_must; break;
      default: l = h = r.p_cannot; break;
    }
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("population bounds envelope the per-node quantities") {
  QuantityProfile profile;
  profile.per_node = {node_result(1.70, 1.79), node_result(1.20, 1.60)};

  QuantityInterval single =
      population_bounds(profile, {{0}}, Quantity::outcome_bounds);
  CHECK(single.lo == doctest::Approx(1.70));
  CHECK(single.hi == doctest::Approx(1.79));

  QuantityInterval both =
      population_bounds(profile, {{0, 1}}, Quantity::outcome_bounds);
  CHECK(both.lo == doctest::Approx(1.20));
  CHECK(both.hi == doctest::Approx(1.79));

  QuantityProfile constant;
  constant.per_node = {node_result(0.3, 0.5), node_result(0.3, 0.5)};
  QuantityInterval c0 = population_bounds(constant, {{0}}, Quantity::outcome_bounds);
  QuantityInterval c1 =
      population_bounds(constant, {{0, 1}}, Quantity::outcome_bounds);
  CHECK(c0.lo == c1.lo);
  CHECK(c0.hi == c1.hi);

  CHECK_THROWS_AS(population_bounds(profile, {{}}, Quantity::outcome_bounds),
                  EmptinessError);
}

TEST_CASE("population bounds equal a brute-force node scan") {
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    QuantityProfile profile;
    std::size_t nodes = 2 + gen() % 20;
    for (std::size_t k = 0; k < nodes; ++k) {
      double a = u(gen), b = u(gen);
      double pm = u(gen), pc = pm + (1 - pm) * u(gen);
      profile.per_node.push_back(
          node_result(std::min(a, b), std::max(a, b), pm, pc));
    }
    IdentifiedSetDraw draw;
    for (std::size_t k = 0; k < nodes; ++k)
      if (u(gen) < 0.5) draw.node_ids.push_back(k);
    if (draw.node_ids.empty()) draw.node_ids.push_back(gen() % nodes);
    for (Quantity q : {Quantity::outcome_bounds, Quantity::event_probability,
                       Quantity::e_sup, Quantity::p_must}) {
      QuantityInterval got = population_bounds(profile, draw, q);
      QuantityInterval want = scan_bounds(profile, draw, q);
      CHECK(got.lo == want.lo);
      CHECK(got.hi == want.hi);
    }
  }
}

TEST_CASE("nested theta sets give nested intervals") {
  std::mt19937 gen(73);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    QuantityProfile profile;
    for (int k = 0; k < 12; ++k) {
      double a = u(gen), b = u(gen);
      profile.per_node.push_back(node_result(std::min(a, b), std::max(a, b)));
    }
    IdentifiedSetDraw small, large;
    for (std::size_t k = 0; k < 12; ++k) {
      if (u(gen) < 0.4) small.node_ids.push_back(k);
      if (u(gen) < 0.4 || (!small.node_ids.empty() && small.node_ids.back() == k))
        large.node_ids.push_back(k);
    }
    if (small.node_ids.empty()) small.node_ids.push_back(0);
    for (std::size_t id : small.node_ids)
      if (std::find(large.node_ids.begin(), large.node_ids.end(), id) ==
          large.node_ids.end())
        large.node_ids.push_back(id);
    std::sort(large.node_ids.begin(), large.node_ids.end());
    QuantityInterval inner =
        population_bounds(profile, small, Quantity::outcome_bounds);
    QuantityInterval outer =
        population_bounds(profile, large, Quantity::outcome_bounds);
    CHECK(outer.lo <= inner.lo);
    CHECK(outer.hi >= inner.hi);
  }
}

TEST_CASE("summed-welfare intervals sit inside the endpoint sums") {
  // Two-node profile computed from the engine: per-player profits and their
  // sum for two discrete supports.
  Game mult = multi_equilibrium_entry_game();
  Game dom = dominant_entry_game();
  std::vector<ColumnSpec> cols = {
      {"profit1", OutcomeSpec::welfare({1, 0}), {}},
      {"profit2", OutcomeSpec::welfare({0, 1}), {}},
      {"summed", OutcomeSpec::welfare({1, 1}), {}},
  };
  EngineOptions exact;
  exact.exact = true;
  CounterfactualSpec spec_a = two_point_spec(mult, dom, 0.5, Concept::mixed2x2,
                                             OutcomeSpec::expected_entrants());
  CounterfactualSpec spec_b = two_point_spec(mult, dom, 0.1, Concept::mixed2x2,
                                             OutcomeSpec::expected_entrants());
  auto node_a = partial_cpds_multi(spec_a, cols, {}, 1, 0, exact);
  auto node_b = partial_cpds_multi(spec_b, cols, {}, 1, 0, exact);

  QuantityProfile p1{{node_a[0], node_b[0]}};
  QuantityProfile p2{{node_a[1], node_b[1]}};
  QuantityProfile sum{{node_a[2], node_b[2]}};
  IdentifiedSetDraw both{{0, 1}};
  QuantityInterval i1 = population_bounds(p1, both, Quantity::outcome_bounds);
  QuantityInterval i2 = population_bounds(p2, both, Quantity::outcome_bounds);
  QuantityInterval is = population_bounds(sum, both, Quantity::outcome_bounds);
  CHECK(is.lo >= i1.lo + i2.lo - 1e-12);
  CHECK(is.hi <= i1.hi + i2.hi + 1e-12);
  // On this instance the upper containment is strict.
  CHECK(is.hi < i1.hi + i2.hi - 1e-6);
}

TEST_CASE("estimated identified set averages the endpoints") {
  std::vector<QuantityInterval> ivs = {{0.0, 1.0}, {0.2, 0.8}};
  QuantityInterval est = estimated_identified_set(ivs);
  CHECK(est.lo == doctest::Approx(0.1));
  CHECK(est.hi == doctest::Approx(0.9));

  std::vector<QuantityInterval> one = {{0.4, 0.6}};
  QuantityInterval same = estimated_identified_set(one);
  CHECK(same.lo == 0.4);
  CHECK(same.hi == 0.6);
}

TEST_CASE("estimated identified set concentrates around a symmetric truth") {
  std::mt19937 gen(79);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<QuantityInterval> ivs;
  const int J = 10000;
  for (int j = 0; j < J; ++j)
    ivs.push_back({1.20 + noise(gen), 1.79 + noise(gen)});
  QuantityInterval est = estimated_identified_set(ivs);
  double se = 0.05 / std::sqrt(static_cast<double>(J));
  CHECK(std::fabs(est.lo - 1.20) <= 3 * se);
  CHECK(std::fabs(est.hi - 1.79) <= 3 * se);
}

TEST_CASE("credible set keeps the narrowest draws and envelopes them") {
  std::vector<QuantityInterval> same = {{0.1, 0.4}, {0.1, 0.4}, {0.1, 0.4}};
  for (double level : {0.3, 0.9, 1.0}) {
    QuantityInterval cs = credible_set(same, level);
    CHECK(cs.lo == 0.1);
    CHECK(cs.hi == 0.4);
  }

  std::vector<QuantityInterval> grows = {{0, 1}, {0, 2}, {0, 3}, {0, 100}};
  QuantityInterval cs = credible_set(grows, 0.75);
  CHECK(cs.lo == 0.0);
  CHECK(cs.hi == 3.0);
  QuantityInterval full = credible_set(grows, 1.0);
  CHECK(full.hi == 100.0);
}

TEST_CASE("credible set envelope property on random draws") {
  std::mt19937 gen(83);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<QuantityInterval> ivs;
    const std::size_t J = 40 + gen() % 100;
    for (std::size_t j = 0; j < J; ++j) {
      double a = u(gen), b = u(gen);
      ivs.push_back({std::min(a, b), std::max(a, b)});
    }
    for (double level : {0.5, 0.75, 0.9, 0.95, 1.0}) {
      QuantityInterval cs = credible_set(ivs, level);
      std::size_t contained = 0;
      for (const auto& iv : ivs)
        if (cs.lo <= iv.lo && iv.hi <= cs.hi) ++contained;
      CHECK(contained >= static_cast<std::size_t>(
                             std::ceil(level * static_cast<double>(J))));
    }
    QuantityInterval est = estimated_identified_set(ivs);
    QuantityInterval full = credible_set(ivs, 1.0);
    CHECK(full.lo <= est.lo);
    CHECK(est.hi <= full.hi);
  }
}

TEST_CASE("posterior ingestion: membership lines, boxes, and errors") {
  ThetaGrid grid;
  grid.nodes = {{0.0}, {1.0}, {2.0}};

  std::istringstream ok("7: 0,1,2\n8: box 0.5 1.5\n");
  auto draws = ingest_posterior_stream(ok, grid);
  REQUIRE(draws.size() == 2);
  CHECK(draws[0].node_ids == std::vector<std::size_t>{0, 1, 2});
  CHECK(draws[1].node_ids == std::vector<std::size_t>{1});

  std::istringstream empty_box("1: box 3.5 3.9\n");
  CHECK_THROWS_AS(ingest_posterior_stream(empty_box, grid), IngestionError);

  std::istringstream bad_id("1: 0,9\n");
  try {
    ingest_posterior_stream(bad_id, grid);
    FAIL("expected ingestion error");
  } catch (const IngestionError& e) {
    CHECK(e.line() == 1);
  }

  CHECK_THROWS_AS(ingest_posterior("/nonexistent/posterior.txt", grid),
                  IngestionError);
}

TEST_CASE("posterior cpds maps draws through population bounds") {
  QuantityProfile profile;
  profile.per_node = {node_result(1.70, 1.79), node_result(1.20, 1.60)};
  std::vector<IdentifiedSetDraw> one = {{{0}}};
  auto intervals = posterior_cpds(profile, one, Quantity::outcome_bounds);
  REQUIRE(intervals.size() == 1);
  CHECK(intervals[0].lo == doctest::Approx(1.70));

  std::vector<IdentifiedSetDraw> same = {{{0, 1}}, {{0, 1}}, {{0, 1}}};
  auto identical = posterior_cpds(profile, same, Quantity::outcome_bounds);
  for (const auto& iv : identical) {
    CHECK(iv.lo == identical[0].lo);
    CHECK(iv.hi == identical[0].hi);
  }

  std::vector<IdentifiedSetDraw> with_empty = {{{0}}, {{}}};
  CHECK_THROWS_AS(posterior_cpds(profile, with_empty, Quantity::outcome_bounds),
                  EmptinessError);
}

TEST_CASE("synthetic posterior degenerates to truth at zero scale") {
  ThetaGrid grid = line_grid(0.0, 1.0, 21);
  ThetaBox truth{{0.25}, {0.75}};
  auto draws = synthetic_posterior(truth, 100, 5, 3, grid, 0.0);
  REQUIRE(draws.size() == 5);
  IdentifiedSetDraw expected = grid_nodes_in_box(grid, truth);
  for (const auto& d : draws) CHECK(d.node_ids == expected.node_ids);

  auto single = synthetic_posterior(truth, 100, 1, 3, grid, 1.0);
  CHECK(single.size() == 1);
  CHECK(!single[0].node_ids.empty());
}

TEST_CASE("synthetic posterior concentrates as N grows") {
  ThetaGrid grid = line_grid(0.0, 1.0, 201);
  ThetaBox truth{{0.25}, {0.75}};
  IdentifiedSetDraw truth_nodes = grid_nodes_in_box(grid, truth);
  IntervalSet truth_iv{grid.nodes[truth_nodes.node_ids.front()][0],
                       grid.nodes[truth_nodes.node_ids.back()][0]};
  double prev = 1e300;
  for (std::uint64_t n : {std::uint64_t{100}, std::uint64_t{10000},
                          std::uint64_t{1000000}}) {
    auto draws = synthetic_posterior(truth, n, 400, 5, grid, 1.0);
    double total = 0.0;
    for (const auto& d : draws) {
      IntervalSet iv{grid.nodes[d.node_ids.front()][0],
                     grid.nodes[d.node_ids.back()][0]};
      total += hausdorff_interval(iv, truth_iv);
    }
    double mean = total / static_cast<double>(draws.size());
    CHECK(mean < prev + 1e-12);
    prev = mean;
  }
}

TEST_CASE("posterior interval spread shrinks like the noise scale") {
  ThetaGrid grid = line_grid(0.0, 1.0, 401);
  ThetaBox truth{{0.3}, {0.7}};
  QuantityProfile profile;
  for (const auto& node : grid.nodes)
    profile.per_node.push_back(node_result(node[0], node[0]));

  auto spread = [&](std::uint64_t n) {
    auto draws = synthetic_posterior(truth, n, 500, 11, grid, 1.0);
    auto ivs = posterior_cpds(profile, draws, Quantity::outcome_bounds);
    double lo_min = 1e300, lo_max = -1e300;
    for (const auto& iv : ivs) {
      lo_min = std::min(lo_min, iv.lo);
      lo_max = std::max(lo_max, iv.lo);
    }
    return lo_max - lo_min;
  };
  double s100 = spread(100), s10k = spread(10000);
  // Scale ratio is 10; grid resolution limits how exactly it shows up.
  CHECK(s10k < 0.35 * s100);
}

TEST_CASE("synthetic posterior gives up after the retry cap") {
  ThetaGrid grid;
  grid.nodes = {{0.0}};
  ThetaBox truth{{5.0}, {5.0}};  // far outside the grid hull
  CHECK_THROWS_AS(synthetic_posterior(truth, 1000000, 2, 7, grid, 1.0),
                  ConfigError);
}
