#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cpds/errors.hpp"
#include "cpds/io.hpp"
#include "fixtures.hpp"

using namespace cpds;
using namespace cpds::testing;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("game files: tensor and linear_entry schemas") {
  json tensor = json::parse(R"({"tensor": {"sizes": [2, 2],
      "utility": [[0, 0, 0.6, -0.4], [0, 0.7, 0, -0.3]]}})");
  Game g = io::game_from_json(tensor);
  CHECK(g.utility[0][2] == doctest::Approx(0.6));

  json linear = json::parse(R"({"linear_entry": {
      "alpha": [0.6, 0.7], "beta": [[0],[0]], "delta": [[0,-1],[-1,0]],
      "x": [[0],[0]], "epsilon": [0,0]}})");
  Game h = io::game_from_json(linear);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t p = 0; p < 4; ++p)
      CHECK(g.utility[i][p] == doctest::Approx(h.utility[i][p]));

  // Round trip through the tensor schema.
  Game back = io::game_from_json(io::game_to_json(h));
  CHECK(back.utility == h.utility);

  CHECK_THROWS_AS(io::game_from_json(json::parse("{}")), ConfigError);
}

TEST_CASE("region files parse into unions of polyhedra") {
  json j = json::parse(R"({"components": [
    {"le": [[[1, 0, 0, 0], 0.25]], "eq": [[[0, 0, 0, 1], 0]]},
    {"eq": [[[1, 0, 0, 0], 0]]}
  ]})");
  RegionUnion regions = io::region_union_from_json(j, 4);
  REQUIRE(regions.size() == 2);
  CHECK(regions[0].le.size() == 1);
  CHECK(regions[0].eq.size() == 1);
  CHECK(regions[1].le.empty());

  json mirror = io::region_union_to_json(regions);
  RegionUnion again = io::region_union_from_json(mirror, 4);
  CHECK(again.size() == 2);

  json bad = json::parse(R"({"components": [{"le": [[[1, 0], 0.25]]}]})");
  CHECK_THROWS_AS(io::region_union_from_json(bad, 4), ConfigError);
}

TEST_CASE("counterfactual spec files") {
  json j = json::parse(R"({
    "players": 2,
    "actions": [2, 2],
    "utility": {"linear_entry": {
      "alpha": [0, 0], "beta": [[1],[1]], "delta": [[0,-1],[-1,0]],
      "x": [[0],[0]], "epsilon": [0,0],
      "bindings": [
        {"name": "alpha", "target": "alpha", "value": 0.25},
        {"name": "beta", "target": "beta", "value": 1.0}
      ]}},
    "distribution": {"parametric": {
      "x": [[{"normal": [0.4375, 0.25]}], [{"normal": [0.4375, 0.25]}]],
      "epsilon": [{"normal": [0, 0.125]}, {"normal": [0, 0.125]}]}},
    "concept": "ce",
    "outcome": {"kind": "event_probability", "min_entrants": 1},
    "events": {"intervals": [[0.5, "inf"]]}
  })");
  CounterfactualSpec spec = io::spec_from_json(j);
  CHECK(spec.players == 2);
  CHECK(spec.solution_concept == Concept::ce);
  CHECK(spec.theta_dim() == 2);
  CHECK(spec.default_theta() == std::vector<double>{0.25, 1.0});
  CHECK(spec.theta_names() == std::vector<std::string>{"alpha", "beta"});
  REQUIRE(spec.events.has_value());
  CHECK(spec.events->intervals()[0].hi ==
        std::numeric_limits<double>::infinity());

  json discrete = json::parse(R"({
    "players": 2,
    "actions": [2, 2],
    "distribution": {"discrete": {"support": [
      {"game": {"linear_entry": {"alpha": [0.6, 0.7], "beta": [[0],[0]],
        "delta": [[0,-1],[-1,0]], "x": [[0],[0]], "epsilon": [0,0]}},
       "prob": 0.3},
      {"game": {"linear_entry": {"alpha": [1.5, 1.2], "beta": [[0],[0]],
        "delta": [[0,-1],[-1,0]], "x": [[0],[0]], "epsilon": [0,0]}},
       "prob": 0.7}]}},
    "concept": "mixed2x2",
    "outcome": {"kind": "expected_entrants"}
  })");
  CounterfactualSpec d = io::spec_from_json(discrete);
  EngineOptions exact;
  exact.exact = true;
  PartialCpds r = partial_cpds(d, {}, 1, 0, exact);
  CHECK(r.e_sup == doctest::Approx(1.79).epsilon(1e-12));
}

TEST_CASE("theta grid csv") {
  std::string path = temp_path("cpds_grid_test.csv");
  {
    std::ofstream out(path);
    out << "# comment\nnode_id, alpha\n0, -1.0\n1, 0.0\n2, 1.0\n";
  }
  ThetaGrid grid = io::load_theta_grid(path);
  REQUIRE(grid.size() == 3);
  CHECK(grid.nodes[2][0] == doctest::Approx(1.0));

  {
    std::ofstream out(path);
    out << "0, -1.0\n2, 1.0\n";  // hole in the ids
  }
  CHECK_THROWS_AS(io::load_theta_grid(path), IngestionError);
  std::remove(path.c_str());
}

TEST_CASE("lookup grids from axes and node lists") {
  UGrid lattice = io::ugrid_from_json(json::parse(
      R"({"axes": [{"lo": 0, "step": 0.5, "count": 3}, [1.0, 2.0]]})"));
  CHECK(lattice.dim() == 2);
  CHECK(lattice.num_nodes() == 6);
  CHECK(lattice.node(5) == std::vector<double>{1.0, 2.0});

  UGrid nodes = io::ugrid_from_json(json::parse(R"({"nodes": [[0, 0], [1, 1]]})"));
  CHECK(nodes.num_nodes() == 2);
  CHECK(nodes.nearest(std::vector<double>{0.9, 0.8}) == 1);
}

TEST_CASE("scenario files") {
  json j = json::parse(R"({"scenarios": [{
    "name": "s1", "kind": "interval_noise", "truth": [0.2, 0.8],
    "noise_scale": 1.0, "sample_sizes": [100, 10000], "replications": 50,
    "seed": 3, "eps": [0.05],
    "probes": [{"interval": [0.4, 0.5]}, {"point": [0.5, 0.0]}]
  }]})");
  auto scenarios = io::scenarios_from_json(j);
  REQUIRE(scenarios.size() == 1);
  CHECK(scenarios[0].kind == Scenario::Kind::interval_noise);
  CHECK(scenarios[0].probes.size() == 2);
  CHECK(scenarios[0].probes[1].kind == Probe::Kind::point2);
}

TEST_CASE("atomic write replaces the file completely") {
  std::string path = temp_path("cpds_atomic_test.txt");
  io::atomic_write(path, "first");
  io::atomic_write(path, "second");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::remove(path.c_str());
}

TEST_CASE("report spec wraps a bare counterfactual spec") {
  json j = json::parse(R"({
    "players": 2,
    "actions": [2, 2],
    "utility": {"linear_entry": {
      "alpha": [0.6, 0.7], "beta": [[0],[0]], "delta": [[0,-1],[-1,0]],
      "x": [[0],[0]], "epsilon": [0,0],
      "bindings": [{"name": "alpha", "target": "alpha", "value": 0.6}]}},
    "distribution": {"degenerate": true},
    "concept": "mixed2x2",
    "outcome": {"kind": "expected_entrants"}
  })");
  io::ReportSpec spec = io::report_spec_from_json(j);
  CHECK(spec.columns.size() == 1);
  CHECK(spec.scenarios.size() == 1);
  CHECK(spec.columns[0].quantity == Quantity::outcome_bounds);
}
