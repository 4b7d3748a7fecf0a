#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpds/engine.hpp"
#include "cpds/errors.hpp"
#include "cpds/harness.hpp"
#include "cpds/identify.hpp"
#include "cpds/io.hpp"
#include "cpds/report.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitEmptiness = 3;
constexpr int kExitIndeterminate = 4;

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content << "\n";
  else
    cpds::io::atomic_write(out_path, content);
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_theta(const std::string& csv) {
  std::vector<double> theta;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    theta.push_back(std::stod(item));
  }
  return theta;
}

struct SweepRange {
  std::string name;
  double lo = 0, hi = 0, step = 0;
  std::vector<double> values() const {
    std::vector<double> v;
    auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    for (std::size_t k = 0; k < count; ++k)
      v.push_back(lo + step * static_cast<double>(k));
    return v;
  }
};

SweepRange parse_sweep(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos)
    throw cpds::ConfigError("sweep must look like name=lo:hi:step");
  SweepRange r;
  r.name = arg.substr(0, eq);
  std::string rest = arg.substr(eq + 1);
  for (char& ch : rest)
    if (ch == ':') ch = ' ';
  std::istringstream in(rest);
  if (!(in >> r.lo >> r.hi >> r.step) || !(r.step > 0.0) || r.hi < r.lo)
    throw cpds::ConfigError("sweep must look like name=lo:hi:step with step > 0");
  return r;
}

struct EngineFlags {
  std::uint64_t draws = 10000;
  std::uint64_t seed = 1;
  bool exact = false;
  bool record_empty = false;
  std::uint32_t partitions = 64;
  std::string grid_lookup_path;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f, bool with_draws = true) {
  if (with_draws) {
    cmd->add_option("--draws", f.draws, "Monte Carlo draws per theta");
    cmd->add_option("--seed", f.seed, "RNG seed");
  }
  cmd->add_flag("--exact", f.exact, "exact aggregation over a discrete support");
  cmd->add_flag("--record-empty", f.record_empty,
                "exclude empty-solution draws and report the exclusion rate "
                "instead of failing");
  cmd->add_option("--partitions", f.partitions,
                  "reduction partition count (recorded; fixes the summation "
                  "order)");
  cmd->add_option("--grid-lookup", f.grid_lookup_path,
                  "grid file enabling nearest-node lookup of precomputed "
                  "per-draw outcomes");
}

cpds::EngineOptions make_options(const EngineFlags& f,
                                 const cpds::LookupTable* lookup) {
  cpds::EngineOptions opts;
  opts.exact = f.exact;
  opts.record_empty = f.record_empty;
  opts.partitions = f.partitions;
  opts.lookup = lookup;
  return opts;
}

json run_metadata(const EngineFlags& f, bool lookup) {
  return json{{"draws", f.draws},
              {"seed", f.seed},
              {"mode", f.exact ? "exact" : "mc"},
              {"evaluation", lookup ? "grid-lookup" : "direct"},
              {"empty_solutions", f.record_empty ? "record" : "strict"},
              {"partitions", f.partitions}};
}

int cmd_solve(const std::string& game_path, const std::string& concept_name,
              const std::string& objective_arg, const std::string& out_path) {
  cpds::Game game = cpds::io::load_game(game_path);
  cpds::Concept concept_kind = cpds::concept_from_string(concept_name);
  cpds::SolutionSet set = cpds::solve_concept(game, concept_kind);

  json out;
  out["concept"] = concept_name;
  out["num_profiles"] = game.actions.num_profiles();
  out["solution_set"] = cpds::io::solution_set_to_json(set);
  if (!objective_arg.empty()) {
    json oj = objective_arg.front() == '{' ? json::parse(objective_arg)
                                           : cpds::io::load_json(objective_arg);
    cpds::OutcomeSpec spec = cpds::io::outcome_from_json(oj, game.actions);
    cpds::LinearFunctional f = cpds::outcome_functional(spec, game);
    cpds::Optimum hi = cpds::maximize_over(set, f, cpds::Direction::maximize);
    cpds::Optimum lo = cpds::maximize_over(set, f, cpds::Direction::minimize);
    out["objective"] = {{"name", spec.name},
                        {"coeffs", f.coeffs},
                        {"constant", f.constant},
                        {"max", {{"value", hi.value}, {"arg", hi.arg.probs}}},
                        {"min", {{"value", lo.value}, {"arg", lo.arg.probs}}}};
  }
  emit(out.dump(2), out_path);
  return 0;
}

int cmd_counterfactual(const std::string& spec_path, const std::string& theta_csv,
                       const EngineFlags& flags, const std::string& out_path) {
  cpds::CounterfactualSpec spec = cpds::io::load_spec(spec_path);
  std::vector<double> theta =
      theta_csv.empty() ? spec.default_theta() : parse_theta(theta_csv);

  cpds::LookupTable lookup;
  bool have_lookup = !flags.grid_lookup_path.empty();
  if (have_lookup)
    lookup = cpds::precompute_grid(spec, cpds::io::load_ugrid(flags.grid_lookup_path));
  cpds::EngineOptions opts = make_options(flags, have_lookup ? &lookup : nullptr);

  cpds::PartialCpds result =
      cpds::partial_cpds(spec, theta, flags.draws, flags.seed, opts);
  json out;
  out["theta"] = theta;
  out["result"] = cpds::io::partial_cpds_to_json(result);
  out["metadata"] = run_metadata(flags, have_lookup);
  emit(out.dump(2), out_path);
  if (result.indeterminate_draws > 0) {
    json err{{"error",
              {{"class", "indeterminate"},
               {"message", "must-event test was indeterminate on " +
                               std::to_string(result.indeterminate_draws) +
                               " draws"}}}};
    std::cerr << err.dump() << "\n";
    return kExitIndeterminate;
  }
  return 0;
}

int cmd_curves(const std::string& spec_path, const std::vector<std::string>& sweeps,
               const EngineFlags& flags, const std::string& out_path) {
  cpds::CounterfactualSpec spec = cpds::io::load_spec(spec_path);
  std::vector<std::string> names = spec.theta_names();
  std::vector<double> base = spec.default_theta();

  std::vector<SweepRange> ranges;
  ranges.reserve(sweeps.size());
  for (const auto& s : sweeps) ranges.push_back(parse_sweep(s));
  if (ranges.empty()) throw cpds::ConfigError("curves needs at least one --sweep");

  std::vector<std::size_t> sweep_index;
  for (const auto& r : ranges) {
    auto it = std::find(names.begin(), names.end(), r.name);
    if (it == names.end())
      throw cpds::ConfigError("sweep name '" + r.name +
                              "' is not a theta binding of the spec");
    sweep_index.push_back(static_cast<std::size_t>(it - names.begin()));
  }

  // Cartesian product, last sweep varying fastest.
  std::vector<std::vector<double>> value_lists;
  std::size_t total = 1;
  for (const auto& r : ranges) {
    value_lists.push_back(r.values());
    total *= value_lists.back().size();
  }
  std::vector<std::vector<double>> thetas;
  thetas.reserve(total);
  for (std::size_t row = 0; row < total; ++row) {
    std::vector<double> theta = base;
    std::size_t rem = row;
    for (std::size_t k = ranges.size(); k-- > 0;) {
      theta[sweep_index[k]] = value_lists[k][rem % value_lists[k].size()];
      rem /= value_lists[k].size();
    }
    thetas.push_back(std::move(theta));
  }

  cpds::LookupTable lookup;
  bool have_lookup = !flags.grid_lookup_path.empty();
  if (have_lookup)
    lookup = cpds::precompute_grid(spec, cpds::io::load_ugrid(flags.grid_lookup_path));
  cpds::EngineOptions opts = make_options(flags, have_lookup ? &lookup : nullptr);

  std::vector<cpds::PartialCpds> results =
      cpds::sweep(spec, thetas, flags.draws, flags.seed, opts);

  std::ostringstream csv;
  for (const auto& name : names) csv << name << ",";
  csv << "e_inf,e_sup,p_could,p_must,se_e_inf,se_e_sup,se_p_could,se_p_must\n";
  std::uint64_t indeterminate = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    for (double v : thetas[r]) csv << format_full(v) << ",";
    const auto& res = results[r];
    csv << format_full(res.e_inf) << "," << format_full(res.e_sup) << ","
        << format_full(res.p_could) << "," << format_full(res.p_must) << ","
        << format_full(res.se_e_inf) << "," << format_full(res.se_e_sup) << ","
        << format_full(res.se_p_could) << "," << format_full(res.se_p_must) << "\n";
    indeterminate += res.indeterminate_draws;
  }
  emit(csv.str(), out_path);
  if (indeterminate > 0) {
    json err{{"error",
              {{"class", "indeterminate"},
               {"message", "must-event test was indeterminate on " +
                               std::to_string(indeterminate) + " draws"}}}};
    std::cerr << err.dump() << "\n";
    return kExitIndeterminate;
  }
  return 0;
}

int cmd_identify(const std::string& spec_path, const std::string& grid_path,
                 const std::string& posterior_path, double level,
                 const EngineFlags& flags, const std::string& out_dir) {
  cpds::io::ReportSpec report_spec = cpds::io::load_report_spec(spec_path);
  cpds::ThetaGrid grid = cpds::io::load_theta_grid(grid_path);
  std::vector<cpds::IdentifiedSetDraw> draws =
      cpds::ingest_posterior(posterior_path, grid);

  std::vector<cpds::ColumnSpec> columns;
  for (const auto& col : report_spec.columns)
    columns.push_back({col.name, col.outcome, col.events});

  cpds::ReportTable table;
  for (const auto& col : report_spec.columns) table.columns.push_back(col.name);
  table.observed = report_spec.observed;
  table.seed = flags.seed;
  table.n_draws = flags.draws;
  table.mode = flags.exact ? "exact" : "mc";
  table.level = level;
  table.partitions = flags.partitions;

  cpds::EngineOptions opts = make_options(flags, nullptr);
  std::uint64_t indeterminate = 0;
  for (const auto& [scenario_name, scenario_spec] : report_spec.scenarios) {
    auto per_theta = cpds::sweep_multi(scenario_spec, columns, grid.nodes,
                                       flags.draws, flags.seed, opts);
    cpds::ReportRow row;
    row.scenario = scenario_name;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      cpds::QuantityProfile profile;
      profile.per_node.reserve(per_theta.size());
      for (const auto& node_results : per_theta) {
        profile.per_node.push_back(node_results[c]);
        indeterminate += node_results[c].indeterminate_draws;
      }
      auto intervals =
          cpds::posterior_cpds(profile, draws, report_spec.columns[c].quantity);
      cpds::ReportCell cell;
      cell.estimated = cpds::estimated_identified_set(intervals);
      cell.credible = cpds::credible_set(intervals, level);
      row.cells.push_back(cell);
    }
    table.rows.push_back(std::move(row));
  }
  cpds::flag_observed(table);

  cpds::io::atomic_write(out_dir + "/report.csv", cpds::report_table_csv(table));
  cpds::io::atomic_write(out_dir + "/report.json",
                         cpds::report_table_json(table).dump(2));
  if (indeterminate > 0) {
    json err{{"error",
              {{"class", "indeterminate"},
               {"message", "must-event test was indeterminate on " +
                               std::to_string(indeterminate) + " draws"}}}};
    std::cerr << err.dump() << "\n";
    return kExitIndeterminate;
  }
  return 0;
}

int cmd_harness(const std::string& scenario_path, const std::string& out_path) {
  std::vector<cpds::Scenario> scenarios = cpds::io::load_scenarios(scenario_path);
  cpds::ConsistencyReport report = cpds::run_scenarios(scenarios);
  emit(cpds::io::consistency_report_to_json(report).dump(2), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("CPDS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"counterfactual predictive distribution sets for finite games"};
  app.require_subcommand(1);

  std::string game_path, concept_name = "ce", objective_arg, out_path;
  auto* solve = app.add_subcommand("solve", "equilibrium sets and optima for a game");
  solve->add_option("--game", game_path, "game file")->required();
  solve->add_option("--concept", concept_name, "psne | mixed2x2 | ce");
  solve->add_option("--objective", objective_arg,
                    "outcome spec (inline JSON or a file path)");
  solve->add_option("--out", out_path, "output file (default stdout)");

  std::string spec_path, theta_csv;
  EngineFlags cf_flags;
  auto* counterfactual =
      app.add_subcommand("counterfactual", "partial CPDS at one theta");
  counterfactual->add_option("--spec", spec_path, "counterfactual spec file")
      ->required();
  counterfactual->add_option("--theta", theta_csv, "comma-separated theta vector");
  add_engine_flags(counterfactual, cf_flags);
  counterfactual->add_option("--out", out_path, "output file (default stdout)");

  std::string id_spec, id_grid, id_posterior, id_out;
  double level = 0.95;
  EngineFlags id_flags;
  auto* identify =
      app.add_subcommand("identify", "posterior CPDS summaries over a theta grid");
  identify->add_option("--spec", id_spec, "report spec file")->required();
  identify->add_option("--grid", id_grid, "theta grid CSV")->required();
  identify->add_option("--posterior", id_posterior, "posterior draws file")->required();
  identify->add_option("--level", level, "credible level");
  add_engine_flags(identify, id_flags);
  identify->add_option("--out", id_out, "output directory")->required();

  std::string curves_spec, curves_out;
  std::vector<std::string> sweeps;
  EngineFlags curves_flags;
  auto* curves = app.add_subcommand("curves", "per-theta bounds along a sweep");
  curves->add_option("--spec", curves_spec, "counterfactual spec file")->required();
  curves->add_option("--sweep", sweeps, "name=lo:hi:step (repeatable)")->required();
  add_engine_flags(curves, curves_flags);
  curves->add_option("--out", curves_out, "output CSV (default stdout)");

  std::string harness_scenarios, harness_out;
  auto* harness =
      app.add_subcommand("harness", "posterior-consistency checks at desk scale");
  harness->add_option("--scenario", harness_scenarios, "scenario file")->required();
  harness->add_option("--out", harness_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(game_path, concept_name, objective_arg, out_path);
    if (counterfactual->parsed())
      return cmd_counterfactual(spec_path, theta_csv, cf_flags, out_path);
    if (identify->parsed())
      return cmd_identify(id_spec, id_grid, id_posterior, level, id_flags, id_out);
    if (curves->parsed())
      return cmd_curves(curves_spec, sweeps, curves_flags, curves_out);
    if (harness->parsed()) return cmd_harness(harness_scenarios, harness_out);
  } catch (const cpds::EmptinessError& e) {
    json err{{"error", {{"class", e.error_class()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitEmptiness;
  } catch (const cpds::Error& e) {
    json err{{"error", {{"class", e.error_class()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    json err{{"error", {{"class", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
