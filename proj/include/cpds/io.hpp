#pragma once

#include <string>

#include <json.hpp>

#include "cpds/engine.hpp"
#include "cpds/harness.hpp"
#include "cpds/identify.hpp"

namespace cpds::io {

using nlohmann::json;

// Game file: {"tensor": {"sizes": [...], "utility": [[...]]}} or
// {"linear_entry": {"alpha": [...], "beta": [[...]], "delta": [[...]],
//                   "x": [[...]], "epsilon": [...]}}.
Game game_from_json(const json& j);
json game_to_json(const Game& g);
Game load_game(const std::string& path);

// Region file: {"components": [{"le": [[row, rhs], ...], "eq": [...]}, ...]},
// or a bare array of components, or a single component object.
RegionUnion region_union_from_json(const json& j, std::size_t expected_dim);
json region_union_to_json(const RegionUnion& regions);

OutcomeSpec outcome_from_json(const json& j, const ActionSpace& actions);
EventSet events_from_json(const json& j, std::size_t num_profiles);

CounterfactualSpec spec_from_json(const json& j);
CounterfactualSpec load_spec(const std::string& path);

UGrid ugrid_from_json(const json& j);
UGrid load_ugrid(const std::string& path);

// Theta grid CSV: "node_id, theta_1, ..., theta_d" per line; ids must be
// 0..K-1 in order. Lines starting with '#' and a non-numeric header line are
// skipped.
ThetaGrid load_theta_grid(const std::string& path);

std::vector<Scenario> scenarios_from_json(const json& j);
std::vector<Scenario> load_scenarios(const std::string& path);

// Report spec for the identify command: quantity columns, scenario specs, and
// optional observed values per column.
struct ReportColumn {
  std::string name;
  OutcomeSpec outcome;
  std::optional<EventSet> events;
  Quantity quantity = Quantity::outcome_bounds;
};

struct ReportSpec {
  std::vector<ReportColumn> columns;
  std::vector<std::pair<std::string, CounterfactualSpec>> scenarios;
  std::map<std::string, double> observed;
};

ReportSpec report_spec_from_json(const json& j);
ReportSpec load_report_spec(const std::string& path);

json partial_cpds_to_json(const PartialCpds& r);
json solution_set_to_json(const SolutionSet& set);
json consistency_report_to_json(const ConsistencyReport& report);

json load_json(const std::string& path);
// Write-temp-then-rename so observers never see a partial file.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace cpds::io
