#include "cpds/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cpds/concepts.hpp"
#include "cpds/errors.hpp"

namespace cpds::io {

namespace {

double number_or_inf(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number or \"inf\"/\"-inf\": " + j.dump());
}

std::vector<double> vec(const json& j) { return j.get<std::vector<double>>(); }

std::vector<std::vector<double>> mat(const json& j) {
  return j.get<std::vector<std::vector<double>>>();
}

LinearEntryGameParams entry_params_from_json(const json& j) {
  LinearEntryGameParams p;
  p.alpha = vec(j.at("alpha"));
  p.beta = mat(j.at("beta"));
  p.delta = mat(j.at("delta"));
  p.x = mat(j.at("x"));
  p.epsilon = vec(j.at("epsilon"));
  p.validate();
  return p;
}

ScalarDist scalar_dist_from_json(const json& j) {
  ScalarDist d;
  if (j.is_number()) {
    d.kind = ScalarDist::Kind::point;
    d.value = j.get<double>();
  } else if (j.contains("point")) {
    d.kind = ScalarDist::Kind::point;
    d.value = j.at("point").get<double>();
  } else if (j.contains("normal")) {
    d.kind = ScalarDist::Kind::normal;
    auto mv = vec(j.at("normal"));
    if (mv.size() != 2) throw ConfigError("normal spec needs [mean, sd]");
    d.mean = mv[0];
    d.sd = mv[1];
  } else if (j.contains("empirical")) {
    d.kind = ScalarDist::Kind::empirical;
    d.samples = vec(j.at("empirical"));
  } else {
    throw ConfigError("unknown scalar distribution: " + j.dump());
  }
  d.validate();
  return d;
}

ThetaBinding binding_from_json(const json& j) {
  ThetaBinding b;
  b.name = j.at("name").get<std::string>();
  b.target = binding_target_from_string(j.at("target").get<std::string>());
  b.player = j.value("player", -1);
  b.col = j.value("col", -1);
  b.profile = j.value("profile", -1);
  b.value = j.value("value", 0.0);
  return b;
}

}  // namespace

Game game_from_json(const json& j) {
  if (j.contains("tensor")) {
    const json& t = j.at("tensor");
    ActionSpace actions(t.at("sizes").get<std::vector<Count>>());
    return Game::make(actions, mat(t.at("utility")));
  }
  if (j.contains("linear_entry"))
    return build_linear_entry_game(entry_params_from_json(j.at("linear_entry")));
  throw ConfigError("game object needs a \"tensor\" or \"linear_entry\" block");
}

json game_to_json(const Game& g) {
  json t;
  t["sizes"] = g.actions.sizes();
  t["utility"] = g.utility;
  return json{{"tensor", t}};
}

Game load_game(const std::string& path) { return game_from_json(load_json(path)); }

namespace {

Polyhedron component_from_json(const json& j, std::size_t dim) {
  Polyhedron poly;
  poly.dim = dim;
  auto read_rows = [&](const char* key, std::vector<LinearConstraint>& out) {
    if (!j.contains(key)) return;
    for (const auto& item : j.at(key)) {
      if (!item.is_array() || item.size() != 2)
        throw ConfigError("region rows are [coeffs, rhs] pairs");
      LinearConstraint c;
      c.coeffs = vec(item.at(0));
      if (c.coeffs.size() != dim)
        throw ConfigError("region row has wrong dimension");
      c.rhs = item.at(1).get<double>();
      out.push_back(std::move(c));
    }
  };
  read_rows("le", poly.le);
  read_rows("eq", poly.eq);
  if (poly.le.empty() && poly.eq.empty())
    throw ConfigError("region component has no constraints");
  return poly;
}

}  // namespace

RegionUnion region_union_from_json(const json& j, std::size_t expected_dim) {
  RegionUnion regions;
  const json* components = &j;
  json holder;
  if (j.is_object() && j.contains("components")) components = &j.at("components");
  if (j.is_object() && !j.contains("components")) {
    holder = json::array({j});
    components = &holder;
  }
  for (const auto& c : *components)
    regions.push_back(component_from_json(c, expected_dim));
  if (regions.empty()) throw ConfigError("region union is empty");
  return regions;
}

json region_union_to_json(const RegionUnion& regions) {
  json components = json::array();
  for (const auto& r : regions) {
    json c;
    c["le"] = json::array();
    c["eq"] = json::array();
    for (const auto& row : r.le) c["le"].push_back(json::array({row.coeffs, row.rhs}));
    for (const auto& row : r.eq) c["eq"].push_back(json::array({row.coeffs, row.rhs}));
    components.push_back(std::move(c));
  }
  return json{{"components", components}};
}

OutcomeSpec outcome_from_json(const json& j, const ActionSpace& actions) {
  const std::string kind = j.at("kind").get<std::string>();
  OutcomeSpec spec;
  if (kind == "expected_entrants") {
    spec = OutcomeSpec::expected_entrants();
  } else if (kind == "event_probability") {
    if (j.contains("profiles")) {
      spec = OutcomeSpec::event(j.at("profiles").get<std::vector<std::size_t>>());
    } else if (j.contains("min_entrants")) {
      spec = OutcomeSpec::min_entrants_event(actions,
                                             j.at("min_entrants").get<std::size_t>());
    } else if (j.contains("player_enters")) {
      auto player = j.at("player_enters").get<std::size_t>();
      std::vector<std::size_t> profiles;
      for (std::size_t p = 0; p < actions.num_profiles(); ++p)
        if (actions.profile_tuple(p).at(player) != 0) profiles.push_back(p);
      spec = OutcomeSpec::event(std::move(profiles));
      spec.name = "p_player_" + std::to_string(player) + "_enters";
    } else {
      throw ConfigError(
          "event_probability needs \"profiles\", \"min_entrants\" or "
          "\"player_enters\"");
    }
  } else if (kind == "welfare") {
    spec = OutcomeSpec::welfare(vec(j.at("weights")));
  } else if (kind == "affine") {
    spec = OutcomeSpec::affine(vec(j.at("coeffs")), j.value("constant", 0.0));
  } else {
    throw ConfigError("unknown outcome kind '" + kind + "'");
  }
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  return spec;
}

EventSet events_from_json(const json& j, std::size_t num_profiles) {
  EventSet events;
  if (j.contains("intervals")) {
    std::vector<Interval> intervals;
    for (const auto& item : j.at("intervals")) {
      if (!item.is_array() || item.size() != 2)
        throw ConfigError("event intervals are [lo, hi] pairs");
      Interval iv;
      iv.lo = item.at(0).is_null() ? -std::numeric_limits<double>::infinity()
                                   : number_or_inf(item.at(0));
      iv.hi = item.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                   : number_or_inf(item.at(1));
      intervals.push_back(iv);
    }
    events.rep = std::move(intervals);
  } else if (j.contains("regions")) {
    events.rep = region_union_from_json(j.at("regions"), num_profiles);
  } else {
    throw ConfigError("event set needs \"intervals\" or \"regions\"");
  }
  events.validate();
  return events;
}

CounterfactualSpec spec_from_json(const json& j) {
  CounterfactualSpec spec;
  spec.players = j.at("players").get<std::size_t>();
  spec.actions = ActionSpace(j.at("actions").get<std::vector<Count>>());

  if (j.contains("utility")) {
    const json& u = j.at("utility");
    if (u.contains("linear_entry")) {
      LinearEntryTemplate tmpl;
      tmpl.base = entry_params_from_json(u.at("linear_entry"));
      if (u.at("linear_entry").contains("bindings"))
        for (const auto& b : u.at("linear_entry").at("bindings"))
          tmpl.bindings.push_back(binding_from_json(b));
      spec.utility = std::move(tmpl);
    } else if (u.contains("tensor")) {
      TensorTemplate tmpl;
      tmpl.base = game_from_json(u);
      if (u.at("tensor").contains("bindings"))
        for (const auto& b : u.at("tensor").at("bindings"))
          tmpl.bindings.push_back(binding_from_json(b));
      spec.utility = std::move(tmpl);
    } else {
      throw ConfigError("utility map needs \"linear_entry\" or \"tensor\"");
    }
  }

  const json& d = j.at("distribution");
  if (d.contains("parametric")) {
    ParametricDist dist;
    for (const auto& row : d.at("parametric").at("x")) {
      std::vector<ScalarDist> per_player;
      for (const auto& cell : row) per_player.push_back(scalar_dist_from_json(cell));
      dist.x.push_back(std::move(per_player));
    }
    for (const auto& cell : d.at("parametric").at("epsilon"))
      dist.epsilon.push_back(scalar_dist_from_json(cell));
    spec.dist = std::move(dist);
  } else if (d.contains("discrete")) {
    DiscreteSupport support;
    for (const auto& item : d.at("discrete").at("support")) {
      support.games.push_back(game_from_json(item.at("game")));
      support.probs.push_back(item.value("prob", 0.0));
    }
    support.weights_from_theta = d.at("discrete").value("weights_from_theta", false);
    spec.dist = std::move(support);
  } else if (d.value("degenerate", false)) {
    spec.dist = DegenerateDist{};
  } else {
    throw ConfigError(
        "distribution needs \"parametric\", \"discrete\" or \"degenerate\"");
  }

  spec.solution_concept = concept_from_string(j.at("concept").get<std::string>());
  spec.outcome = outcome_from_json(j.at("outcome"), spec.actions);
  if (j.contains("events"))
    spec.events = events_from_json(j.at("events"), spec.actions.num_profiles());
  spec.validate();
  return spec;
}

CounterfactualSpec load_spec(const std::string& path) {
  return spec_from_json(load_json(path));
}

UGrid ugrid_from_json(const json& j) {
  UGrid grid;
  if (j.contains("axes")) {
    UGridLattice lattice;
    for (const auto& axis : j.at("axes")) {
      std::vector<double> values;
      if (axis.is_array()) {
        values = vec(axis);
      } else {
        double lo = axis.at("lo").get<double>();
        double step = axis.at("step").get<double>();
        auto count = axis.at("count").get<std::size_t>();
        if (count < 1 || !(step > 0.0))
          throw ConfigError("grid axis needs count >= 1 and step > 0");
        for (std::size_t k = 0; k < count; ++k)
          values.push_back(lo + step * static_cast<double>(k));
      }
      if (values.empty()) throw ConfigError("grid axis is empty");
      if (!std::is_sorted(values.begin(), values.end()))
        throw ConfigError("grid axis values must be ascending");
      lattice.axes.push_back(std::move(values));
    }
    grid.rep = std::move(lattice);
  } else if (j.contains("nodes")) {
    grid.rep = mat(j.at("nodes"));
    if (grid.num_nodes() == 0) throw ConfigError("grid has no nodes");
  } else {
    throw ConfigError("grid needs \"axes\" or \"nodes\"");
  }
  return grid;
}

UGrid load_ugrid(const std::string& path) { return ugrid_from_json(load_json(path)); }

ThetaGrid load_theta_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open theta grid '" + path + "'", 0);
  ThetaGrid grid;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream row(line);
    double id;
    if (!(row >> id)) {
      if (grid.nodes.empty()) continue;  // header line
      throw IngestionError("malformed grid row", line_no);
    }
    if (static_cast<std::size_t>(id) != grid.nodes.size())
      throw IngestionError("node ids must be contiguous from 0", line_no);
    std::vector<double> coords;
    double v;
    while (row >> v) coords.push_back(v);
    if (coords.empty()) throw IngestionError("grid node has no coordinates", line_no);
    grid.nodes.push_back(std::move(coords));
  }
  grid.validate();
  return grid;
}

namespace {

Probe probe_from_json(const json& j) {
  Probe p;
  if (j.contains("interval")) {
    auto iv = vec(j.at("interval"));
    if (iv.size() != 2) throw ConfigError("probe interval needs [lo, hi]");
    p.kind = Probe::Kind::interval;
    p.lo = iv[0];
    p.hi = iv[1];
  } else if (j.contains("point")) {
    auto pt = vec(j.at("point"));
    if (pt.size() != 2) throw ConfigError("probe point needs [x, y]");
    p.kind = Probe::Kind::point2;
    p.x = pt[0];
    p.y = pt[1];
  } else {
    throw ConfigError("probe needs \"interval\" or \"point\"");
  }
  return p;
}

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  sc.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("truth")) {
    auto t = vec(j.at("truth"));
    if (t.size() != 2) throw ConfigError("scenario truth needs [lo, hi]");
    sc.truth = {t[0], t[1]};
  }
  sc.noise_scale = j.value("noise_scale", 1.0);
  if (j.contains("sample_sizes"))
    sc.sample_sizes = j.at("sample_sizes").get<std::vector<std::uint64_t>>();
  sc.replications = j.value("replications", std::size_t{2000});
  sc.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("eps")) sc.eps_grid = vec(j.at("eps"));
  if (j.contains("probes"))
    for (const auto& p : j.at("probes")) sc.probes.push_back(probe_from_json(p));
  sc.grid_points = j.value("grid_points", std::size_t{201});
  sc.map_scale = j.value("map_scale", 1.0);
  if (j.contains("rule")) {
    sc.rule.final_threshold = j.at("rule").value("final_threshold", 0.05);
    sc.rule.slack = j.at("rule").value("slack", 0.02);
  }
  return sc;
}

}  // namespace

std::vector<Scenario> scenarios_from_json(const json& j) {
  std::vector<Scenario> out;
  const json& list = j.is_array() ? j : j.at("scenarios");
  for (const auto& item : list) out.push_back(scenario_from_json(item));
  if (out.empty()) throw ConfigError("scenario file has no scenarios");
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  return scenarios_from_json(load_json(path));
}

ReportSpec report_spec_from_json(const json& j) {
  ReportSpec spec;
  if (j.contains("columns")) {
    for (const auto& sj : j.at("scenarios")) {
      std::string name = sj.at("name").get<std::string>();
      CounterfactualSpec cs = sj.contains("spec_path")
                                  ? load_spec(sj.at("spec_path").get<std::string>())
                                  : spec_from_json(sj.at("spec"));
      spec.scenarios.emplace_back(std::move(name), std::move(cs));
    }
    for (const auto& cj : j.at("columns")) {
      ReportColumn col;
      col.name = cj.at("name").get<std::string>();
      const ActionSpace& actions = spec.scenarios.front().second.actions;
      col.outcome = outcome_from_json(cj.at("outcome"), actions);
      if (cj.contains("events"))
        col.events = events_from_json(cj.at("events"), actions.num_profiles());
      col.quantity = cj.contains("quantity")
                         ? quantity_from_string(cj.at("quantity").get<std::string>())
                         : (col.events ? Quantity::event_probability
                                       : Quantity::outcome_bounds);
      spec.columns.push_back(std::move(col));
    }
    if (j.contains("observed"))
      for (const auto& [key, value] : j.at("observed").items())
        spec.observed[key] = value.get<double>();
  } else {
    // A bare counterfactual spec: one scenario, one column.
    CounterfactualSpec cs = spec_from_json(j);
    ReportColumn col;
    col.name = cs.outcome.name.empty() ? "outcome" : cs.outcome.name;
    col.outcome = cs.outcome;
    col.events = cs.events;
    col.quantity =
        col.events ? Quantity::event_probability : Quantity::outcome_bounds;
    spec.columns.push_back(std::move(col));
    spec.scenarios.emplace_back("spec", std::move(cs));
  }
  if (spec.columns.empty() || spec.scenarios.empty())
    throw ConfigError("report spec needs columns and scenarios");
  return spec;
}

ReportSpec load_report_spec(const std::string& path) {
  return report_spec_from_json(load_json(path));
}

json partial_cpds_to_json(const PartialCpds& r) {
  json j;
  j["e_sup"] = r.e_sup;
  j["e_inf"] = r.e_inf;
  j["p_could"] = r.p_could;
  j["p_must"] = r.p_must;
  j["p_cannot"] = r.p_cannot;
  j["se"] = {{"e_sup", r.se_e_sup},
             {"e_inf", r.se_e_inf},
             {"p_could", r.se_p_could},
             {"p_must", r.se_p_must},
             {"p_cannot", r.se_p_cannot}};
  j["n_draws"] = r.n_draws;
  j["excluded_draws"] = r.excluded_draws;
  j["indeterminate_draws"] = r.indeterminate_draws;
  j["exclusion_rate"] = r.exclusion_rate;
  j["partitions"] = r.partitions;
  j["exact"] = r.exact;
  if (r.lookup_coverage_warning)
    j["warnings"] = json::array(
        {"lookup grid does not bracket the 6-sigma box of the utility distribution"});
  return j;
}

json solution_set_to_json(const SolutionSet& set) {
  json j;
  if (set.holds_vertices()) {
    j["type"] = "vertices";
    json vs = json::array();
    for (const auto& v : set.vertices()) vs.push_back(v.probs);
    j["vertices"] = vs;
    j["count"] = set.vertices().size();
    j["knife_edge_count"] = set.knife_edge_count;
  } else {
    const Polyhedron& poly = set.polyhedron();
    j["type"] = "polyhedron";
    j["dim"] = poly.dim;
    json le = json::array(), eq = json::array();
    for (const auto& c : poly.le) le.push_back(json::array({c.coeffs, c.rhs}));
    for (const auto& c : poly.eq) eq.push_back(json::array({c.coeffs, c.rhs}));
    j["le"] = le;
    j["eq"] = eq;
    // Per-coordinate bounds; a degenerate polytope collapses to a point.
    json bounds = json::array();
    std::vector<double> point(poly.dim, 0.0);
    bool degenerate = true;
    for (std::size_t k = 0; k < poly.dim; ++k) {
      std::vector<double> e(poly.dim, 0.0);
      e[k] = 1.0;
      double hi = maximize_over(set, LinearFunctional{e, 0.0}, Direction::maximize).value;
      double lo = maximize_over(set, LinearFunctional{e, 0.0}, Direction::minimize).value;
      bounds.push_back(json::array({lo, hi}));
      point[k] = 0.5 * (lo + hi);
      if (hi - lo > 1e-8) degenerate = false;
    }
    j["coordinate_bounds"] = bounds;
    if (degenerate) j["point"] = point;
  }
  return j;
}

namespace {

json series_to_json(const SeriesResult& s) {
  json j;
  j["sample_sizes"] = s.sample_sizes;
  j["values"] = s.values;
  j["pass"] = s.pass;
  return j;
}

}  // namespace

json consistency_report_to_json(const ConsistencyReport& report) {
  json scenarios = json::array();
  for (const auto& sc : report.scenarios) {
    json j;
    j["name"] = sc.name;
    j["kind"] = sc.kind;
    json hausdorff_checks = json::array();
    for (const auto& [eps, series] : sc.hausdorff) {
      json e;
      e["eps"] = eps;
      e["fraction_exceeding"] = series_to_json(series);
      hausdorff_checks.push_back(std::move(e));
    }
    j["hausdorff"] = hausdorff_checks;
    json hitting_checks = json::array();
    for (const auto& probe : sc.hitting) {
      json p;
      p["probe"] = probe.probe;
      p["target"] = probe.target;
      p["hit_probability"] = series_to_json(probe.series);
      hitting_checks.push_back(std::move(p));
    }
    j["hitting"] = hitting_checks;
    j["hausdorff_pass"] = sc.hausdorff_pass;
    j["hitting_pass"] = sc.hitting_pass;
    j["agree"] = sc.agree;
    scenarios.push_back(std::move(j));
  }
  return json{{"scenarios", scenarios}};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("failed to parse '" + path + "': " + e.what());
  }
  return j;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace cpds::io
