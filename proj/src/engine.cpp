#include "cpds/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "cpds/errors.hpp"
#include "cpds/rng.hpp"

namespace cpds {
namespace {

// Neumaier compensated sum; merge order is fixed by partition index so a run
// is reproducible for a given partition count regardless of thread count.
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
  void merge(const Kahan& o) {
    add(o.s);
    c += o.c;
  }
};

struct ColumnAccum {
  Kahan sup, supsq, inf, infsq;
  std::uint64_t could_yes = 0, must_yes = 0, must_indet = 0;
  bool saw_events = false;

  void add(const DrawOutcome& o) {
    sup.add(o.hi);
    supsq.add(o.hi * o.hi);
    inf.add(o.lo);
    infsq.add(o.lo * o.lo);
    if (o.could.has_value()) {
      saw_events = true;
      if (*o.could) ++could_yes;
    }
    if (o.must.has_value()) {
      if (*o.must == Tribool::yes) ++must_yes;
      if (*o.must == Tribool::indeterminate) ++must_indet;
    }
  }
  void merge(const ColumnAccum& o) {
    sup.merge(o.sup);
    supsq.merge(o.supsq);
    inf.merge(o.inf);
    infsq.merge(o.infsq);
    could_yes += o.could_yes;
    must_yes += o.must_yes;
    must_indet += o.must_indet;
    saw_events = saw_events || o.saw_events;
  }
};

struct DrawEval {
  std::vector<DrawOutcome> cols;
  bool empty = false;
};

DrawEval evaluate_game(const Game& game, Concept solution_concept,
                       std::span<const ColumnSpec> columns) {
  DrawEval ev;
  SolutionSet set = solve_concept(game, solution_concept);
  if (set.holds_vertices() && set.vertices().empty()) {
    ev.empty = true;
    return ev;
  }
  ev.cols.reserve(columns.size());
  for (const auto& col : columns) {
    DrawOutcome o = draw_bounds_on(set, game, col.outcome);
    if (col.events) apply_events_on(set, o, *col.events);
    ev.cols.push_back(o);
  }
  return ev;
}

double binomial_se(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double mean_se(const Kahan& sum, const Kahan& sumsq, std::uint64_t n) {
  if (n < 2) return 0.0;
  double nn = static_cast<double>(n);
  double mean = sum.value() / nn;
  double var = (sumsq.value() - nn * mean * mean) / (nn - 1.0);
  return std::sqrt(std::max(0.0, var) / nn);
}

PartialCpds finalize_mc(const ColumnAccum& a, std::uint64_t n, std::uint64_t excluded,
                        std::uint64_t n_eff, std::uint32_t partitions) {
  PartialCpds r;
  r.n_draws = n;
  r.excluded_draws = excluded;
  r.partitions = partitions;
  r.exclusion_rate = n ? static_cast<double>(excluded) / static_cast<double>(n) : 0.0;
  r.indeterminate_draws = a.must_indet;
  if (n_eff == 0) return r;
  double nn = static_cast<double>(n_eff);
  r.e_sup = a.sup.value() / nn;
  r.e_inf = a.inf.value() / nn;
  r.se_e_sup = mean_se(a.sup, a.supsq, n_eff);
  r.se_e_inf = mean_se(a.inf, a.infsq, n_eff);
  if (a.saw_events) {
    r.p_could = static_cast<double>(a.could_yes) / nn;
    r.p_must = static_cast<double>(a.must_yes) / nn;
    r.p_cannot = 1.0 - r.p_could;
    r.se_p_could = binomial_se(r.p_could, n_eff);
    r.se_p_must = binomial_se(r.p_must, n_eff);
    r.se_p_cannot = r.se_p_could;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec validation and theta binding

void CounterfactualSpec::validate() const {
  if (players == 0 || actions.num_players() != players)
    throw ConfigError("spec player count does not match the action space");
  if (std::holds_alternative<DiscreteSupport>(dist)) {
    const auto& support = std::get<DiscreteSupport>(dist);
    if (support.games.empty()) throw ConfigError("discrete support is empty");
    if (!support.weights_from_theta) support.validate();
    for (const auto& g : support.games)
      if (!(g.actions == actions))
        throw ConfigError("support games disagree with the spec action space");
  } else {
    if (!utility.has_value())
      throw ConfigError("spec needs a utility map unless a discrete support is given");
    if (std::holds_alternative<LinearEntryTemplate>(*utility)) {
      if (!actions.binary())
        throw UnsupportedError("the linear entry family needs binary action spaces");
      std::get<LinearEntryTemplate>(*utility).base.validate();
    } else {
      std::get<TensorTemplate>(*utility).base.validate();
      if (std::holds_alternative<ParametricDist>(dist))
        throw ConfigError("parametric distributions need the linear entry utility map");
    }
  }
}

static const std::vector<ThetaBinding>* spec_bindings(const CounterfactualSpec& spec) {
  if (!spec.utility.has_value()) return nullptr;
  if (std::holds_alternative<LinearEntryTemplate>(*spec.utility))
    return &std::get<LinearEntryTemplate>(*spec.utility).bindings;
  return &std::get<TensorTemplate>(*spec.utility).bindings;
}

std::size_t CounterfactualSpec::theta_dim() const {
  std::size_t d = 0;
  if (const auto* b = spec_bindings(*this)) d += b->size();
  if (std::holds_alternative<DiscreteSupport>(dist) &&
      std::get<DiscreteSupport>(dist).weights_from_theta)
    d += std::get<DiscreteSupport>(dist).games.size();
  return d;
}

std::vector<double> CounterfactualSpec::default_theta() const {
  std::vector<double> theta;
  if (const auto* b = spec_bindings(*this))
    for (const auto& binding : *b) theta.push_back(binding.value);
  if (std::holds_alternative<DiscreteSupport>(dist) &&
      std::get<DiscreteSupport>(dist).weights_from_theta)
    for (double p : std::get<DiscreteSupport>(dist).probs) theta.push_back(p);
  return theta;
}

std::vector<std::string> CounterfactualSpec::theta_names() const {
  std::vector<std::string> names;
  if (const auto* b = spec_bindings(*this))
    for (const auto& binding : *b) names.push_back(binding.name);
  if (std::holds_alternative<DiscreteSupport>(dist) &&
      std::get<DiscreteSupport>(dist).weights_from_theta) {
    const auto& s = std::get<DiscreteSupport>(dist);
    for (std::size_t k = 0; k < s.games.size(); ++k)
      names.push_back("w" + std::to_string(k));
  }
  return names;
}

namespace {

void apply_binding_linear(const ThetaBinding& b, double v, LinearEntryGameParams& p,
                          ParametricDist& dist) {
  const std::size_t players = p.alpha.size();
  auto player_range = [&](int sel) {
    std::pair<std::size_t, std::size_t> r{0, players};
    if (sel >= 0) r = {static_cast<std::size_t>(sel), static_cast<std::size_t>(sel) + 1};
    if (r.second > players) throw ConfigError("binding player index out of range");
    return r;
  };
  switch (b.target) {
    case ThetaBinding::Target::alpha: {
      auto [lo, hi] = player_range(b.player);
      for (std::size_t i = lo; i < hi; ++i) p.alpha[i] = v;
      break;
    }
    case ThetaBinding::Target::beta: {
      auto [lo, hi] = player_range(b.player);
      for (std::size_t i = lo; i < hi; ++i) {
        if (b.col >= 0) {
          if (static_cast<std::size_t>(b.col) >= p.beta[i].size())
            throw ConfigError("binding covariate index out of range");
          p.beta[i][b.col] = v;
        } else {
          for (auto& entry : p.beta[i]) entry = v;
        }
      }
      break;
    }
    case ThetaBinding::Target::delta: {
      auto [lo, hi] = player_range(b.player);
      for (std::size_t i = lo; i < hi; ++i) {
        if (b.col >= 0) {
          if (static_cast<std::size_t>(b.col) >= players || b.col == static_cast<int>(i))
            throw ConfigError("delta binding must target an off-diagonal entry");
          p.delta[i][b.col] = v;
        } else {
          for (std::size_t j = 0; j < players; ++j)
            if (j != i) p.delta[i][j] = v;
        }
      }
      break;
    }
    case ThetaBinding::Target::eps_sd: {
      if (!(v >= 0.0)) throw ConfigError("eps_sd binding needs a nonnegative value");
      auto [lo, hi] = player_range(b.player);
      for (std::size_t i = lo; i < hi; ++i) {
        if (i >= dist.epsilon.size())
          throw ConfigError("eps_sd binding needs a parametric distribution");
        dist.epsilon[i].sd = v;
      }
      break;
    }
    case ThetaBinding::Target::tensor_entry:
      throw ConfigError("tensor_entry binding is not valid for the linear entry map");
  }
}

void apply_binding_tensor(const ThetaBinding& b, double v, Game& g) {
  if (b.target != ThetaBinding::Target::tensor_entry)
    throw ConfigError("tensor templates only support tensor_entry bindings");
  if (b.player < 0 || static_cast<std::size_t>(b.player) >= g.utility.size())
    throw ConfigError("tensor binding player index out of range");
  if (b.profile < 0 ||
      static_cast<std::size_t>(b.profile) >= g.actions.num_profiles())
    throw ConfigError("tensor binding profile index out of range");
  g.utility[b.player][b.profile] = v;
}

}  // namespace

ResolvedDraws resolve_at_theta(const CounterfactualSpec& spec,
                               std::span<const double> theta) {
  spec.validate();
  if (theta.size() != spec.theta_dim())
    throw ConfigError("theta has dimension " + std::to_string(theta.size()) +
                      ", spec expects " + std::to_string(spec.theta_dim()));
  ResolvedDraws r;
  const auto* bindings = spec_bindings(spec);
  std::size_t used = bindings ? bindings->size() : 0;

  if (std::holds_alternative<DiscreteSupport>(spec.dist)) {
    const auto& support = std::get<DiscreteSupport>(spec.dist);
    r.mode = ResolvedDraws::Mode::discrete;
    r.support = &support;
    r.probs = support.probs;
    if (support.weights_from_theta) {
      r.probs.assign(theta.begin() + used, theta.end());
      double sum = 0.0;
      for (double p : r.probs) {
        if (!(p >= 0.0)) throw ConfigError("theta-bound support weights must be >= 0");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-12)
        throw ConfigError("theta-bound support weights must sum to 1");
      if (r.probs.size() != support.games.size())
        throw ConfigError("theta-bound support weight count mismatch");
    }
    r.cdf.resize(r.probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < r.probs.size(); ++k) {
      acc += r.probs[k];
      r.cdf[k] = acc;
    }
    if (!r.cdf.empty()) r.cdf.back() = 1.0;
    return r;
  }

  if (std::holds_alternative<LinearEntryTemplate>(*spec.utility)) {
    const auto& tmpl = std::get<LinearEntryTemplate>(*spec.utility);
    r.params = tmpl.base;
    if (std::holds_alternative<ParametricDist>(spec.dist)) {
      r.mode = ResolvedDraws::Mode::parametric;
      r.pdist = std::get<ParametricDist>(spec.dist);
      r.covariates = tmpl.base.beta.empty() ? 0 : tmpl.base.beta[0].size();
      r.pdist.validate(spec.players, r.covariates);
    } else {
      r.mode = ResolvedDraws::Mode::degenerate;
    }
    for (std::size_t k = 0; k < tmpl.bindings.size(); ++k)
      apply_binding_linear(tmpl.bindings[k], theta[k], r.params, r.pdist);
    if (r.mode == ResolvedDraws::Mode::degenerate)
      r.fixed_game = build_linear_entry_game(r.params);
    return r;
  }

  const auto& tmpl = std::get<TensorTemplate>(*spec.utility);
  r.mode = ResolvedDraws::Mode::degenerate;
  r.fixed_game = tmpl.base;
  for (std::size_t k = 0; k < tmpl.bindings.size(); ++k)
    apply_binding_tensor(tmpl.bindings[k], theta[k], r.fixed_game);
  return r;
}

std::size_t ResolvedDraws::support_index(std::uint64_t draw, std::uint64_t seed) const {
  double u = rng::uniform01(seed, draw, 0);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

void ResolvedDraws::game_into(std::uint64_t draw, std::uint64_t seed, Game& out,
                              LinearEntryGameParams& scratch) const {
  switch (mode) {
    case Mode::discrete:
      out = support->games[support_index(draw, seed)];
      return;
    case Mode::degenerate:
      out = fixed_game;
      return;
    case Mode::parametric: {
      scratch = params;
      const std::size_t players = params.alpha.size();
      // Fixed uniform layout per draw: x is player-major over covariates, the
      // epsilon block follows. Theta never shifts the layout, which is what
      // keeps random numbers common across a sweep.
      for (std::size_t i = 0; i < players; ++i)
        for (std::size_t c = 0; c < covariates; ++c)
          scratch.x[i][c] = pdist.x[i][c].draw(seed, draw, i * covariates + c);
      for (std::size_t i = 0; i < players; ++i)
        scratch.epsilon[i] = pdist.epsilon[i].draw(seed, draw, players * covariates + i);
      build_linear_entry_game_into(scratch, out);
      return;
    }
  }
}

Game utility_draw(const CounterfactualSpec& spec, std::span<const double> theta,
                  std::uint64_t index, std::uint64_t seed) {
  ResolvedDraws r = resolve_at_theta(spec, theta);
  Game g;
  LinearEntryGameParams scratch;
  r.game_into(index, seed, g, scratch);
  return g;
}

std::vector<Game> draw_utilities(const CounterfactualSpec& spec,
                                 std::span<const double> theta, std::uint64_t n,
                                 std::uint64_t seed) {
  if (n < 1) throw ConfigError("need at least one draw");
  ResolvedDraws r = resolve_at_theta(spec, theta);
  std::vector<Game> games;
  games.reserve(n);
  Game g;
  LinearEntryGameParams scratch;
  for (std::uint64_t i = 0; i < n; ++i) {
    r.game_into(i, seed, g, scratch);
    games.push_back(g);
  }
  return games;
}

std::vector<std::pair<Game, double>> exact_support(const CounterfactualSpec& spec,
                                                   std::span<const double> theta) {
  ResolvedDraws r = resolve_at_theta(spec, theta);
  std::vector<std::pair<Game, double>> out;
  if (r.mode == ResolvedDraws::Mode::discrete) {
    for (std::size_t k = 0; k < r.support->games.size(); ++k)
      out.emplace_back(r.support->games[k], r.probs[k]);
  } else if (r.mode == ResolvedDraws::Mode::degenerate) {
    out.emplace_back(r.fixed_game, 1.0);
  } else {
    throw ConfigError("exact mode needs a discrete (or degenerate) distribution");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free utility coordinates and lookup grids

std::vector<std::pair<std::size_t, std::size_t>> free_coordinate_slots(
    const ActionSpace& actions) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<Count> tuple(actions.num_players());
  for (std::size_t i = 0; i < actions.num_players(); ++i)
    for (std::size_t p = 0; p < actions.num_profiles(); ++p) {
      actions.profile_tuple_into(p, tuple);
      if (tuple[i] != 0) slots.emplace_back(i, p);
    }
  return slots;
}

std::vector<double> free_coordinates(const Game& game) {
  auto slots = free_coordinate_slots(game.actions);
  std::vector<double> coords(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k)
    coords[k] = game.utility[slots[k].first][slots[k].second];
  return coords;
}

Game game_from_free_coordinates(const ActionSpace& actions,
                                std::span<const double> coords) {
  auto slots = free_coordinate_slots(actions);
  if (coords.size() != slots.size())
    throw DimensionError("free coordinate count mismatch");
  Game g;
  g.actions = actions;
  g.utility.assign(actions.num_players(),
                   std::vector<double>(actions.num_profiles(), 0.0));
  for (std::size_t k = 0; k < slots.size(); ++k)
    g.utility[slots[k].first][slots[k].second] = coords[k];
  return g;
}

std::size_t UGrid::dim() const {
  if (std::holds_alternative<UGridLattice>(rep))
    return std::get<UGridLattice>(rep).axes.size();
  const auto& nodes = std::get<std::vector<std::vector<double>>>(rep);
  return nodes.empty() ? 0 : nodes[0].size();
}

std::size_t UGrid::num_nodes() const {
  if (std::holds_alternative<UGridLattice>(rep)) {
    std::size_t n = 1;
    for (const auto& axis : std::get<UGridLattice>(rep).axes) n *= axis.size();
    return n;
  }
  return std::get<std::vector<std::vector<double>>>(rep).size();
}

std::vector<double> UGrid::node(std::size_t id) const {
  if (!std::holds_alternative<UGridLattice>(rep))
    return std::get<std::vector<std::vector<double>>>(rep).at(id);
  const auto& axes = std::get<UGridLattice>(rep).axes;
  std::vector<double> coords(axes.size());
  for (std::size_t d = axes.size(); d-- > 0;) {
    coords[d] = axes[d][id % axes[d].size()];
    id /= axes[d].size();
  }
  return coords;
}

std::size_t UGrid::nearest(std::span<const double> point) const {
  if (point.size() != dim()) throw DimensionError("grid query dimension mismatch");
  if (!std::holds_alternative<UGridLattice>(rep)) {
    const auto& nodes = std::get<std::vector<std::vector<double>>>(rep);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < point.size(); ++j)
        d = std::max(d, std::fabs(nodes[k][j] - point[j]));
      if (d < best_d) {  // strict keeps the lower id on ties
        best_d = d;
        best = k;
      }
    }
    return best;
  }
  const auto& axes = std::get<UGridLattice>(rep).axes;
  // Chebyshev-nearest lattice node. First the attainable distance, then pick
  // per axis the lowest index within it so exact ties land on the lowest id.
  double radius = 0.0;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const auto& axis = axes[d];
    auto it = std::lower_bound(axis.begin(), axis.end(), point[d]);
    double best = std::numeric_limits<double>::infinity();
    if (it != axis.end()) best = std::min(best, std::fabs(*it - point[d]));
    if (it != axis.begin()) best = std::min(best, std::fabs(*(it - 1) - point[d]));
    radius = std::max(radius, best);
  }
  std::size_t id = 0;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const auto& axis = axes[d];
    auto it = std::lower_bound(axis.begin(), axis.end(), point[d] - radius);
    if (it == axis.end() || std::fabs(*it - point[d]) > radius)
      throw Error("internal", "lattice nearest-node search failed");
    id = id * axis.size() + static_cast<std::size_t>(it - axis.begin());
  }
  return id;
}

std::pair<double, double> UGrid::hull(std::size_t d) const {
  if (std::holds_alternative<UGridLattice>(rep)) {
    const auto& axis = std::get<UGridLattice>(rep).axes.at(d);
    return {axis.front(), axis.back()};
  }
  const auto& nodes = std::get<std::vector<std::vector<double>>>(rep);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& nd : nodes) {
    lo = std::min(lo, nd.at(d));
    hi = std::max(hi, nd.at(d));
  }
  return {lo, hi};
}

LookupTable precompute_grid(const CounterfactualSpec& spec, UGrid grid) {
  std::vector<ColumnSpec> cols{{spec.outcome.name, spec.outcome, spec.events}};
  return precompute_grid(spec, std::move(grid), cols, true);
}

LookupTable precompute_grid(const CounterfactualSpec& spec, UGrid grid,
                            std::span<const ColumnSpec> columns, bool parallel) {
  spec.validate();
  auto slots = free_coordinate_slots(spec.actions);
  if (grid.dim() != slots.size())
    throw ConfigError("grid dimension " + std::to_string(grid.dim()) +
                      " != free utility coordinate count " +
                      std::to_string(slots.size()));
  LookupTable table;
  table.grid = std::move(grid);
  table.columns.assign(columns.begin(), columns.end());
  const std::size_t nodes = table.grid.num_nodes();
  table.outcomes.assign(columns.size(), std::vector<DrawOutcome>(nodes));
  table.empty_solution.assign(nodes, 0);

  std::string first_error;
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::int64_t id = 0; id < static_cast<std::int64_t>(nodes); ++id) {
    try {
      Game g = game_from_free_coordinates(spec.actions, table.grid.node(id));
      DrawEval ev = evaluate_game(g, spec.solution_concept, columns);
      if (ev.empty) {
        table.empty_solution[id] = 1;
      } else {
        for (std::size_t c = 0; c < columns.size(); ++c)
          table.outcomes[c][id] = ev.cols[c];
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw Error("internal", "grid precompute failed: " + first_error);
  return table;
}

// ---------------------------------------------------------------------------
// Aggregation kernels

namespace {

struct PendingError {
  enum class Kind { none, emptiness, other } kind = Kind::none;
  std::uint64_t draw = 0;
  std::string cls, msg;
};

// Evaluation context shared by the serial and parallel kernels: per-draw
// evaluation dispatch with caches for finite-support and degenerate modes.
struct EvalContext {
  const ResolvedDraws* resolved;
  Concept solution_concept;
  std::span<const ColumnSpec> columns;
  const LookupTable* lookup = nullptr;
  std::vector<DrawEval> support_cache;  // discrete mode
  DrawEval degenerate_cache;
  bool coverage_warning = false;

  const DrawEval* eval_at(std::uint64_t i, std::uint64_t seed, Game& game_scratch,
                          LinearEntryGameParams& param_scratch,
                          DrawEval& eval_scratch) const {
    switch (resolved->mode) {
      case ResolvedDraws::Mode::discrete:
        return &support_cache[resolved->support_index(i, seed)];
      case ResolvedDraws::Mode::degenerate:
        return &degenerate_cache;
      case ResolvedDraws::Mode::parametric:
        resolved->game_into(i, seed, game_scratch, param_scratch);
        if (lookup) {
          std::vector<double> coords = free_coordinates(game_scratch);
          std::size_t id = lookup->grid.nearest(coords);
          if (lookup->empty_solution[id]) {
            eval_scratch.empty = true;
            return &eval_scratch;
          }
          eval_scratch.empty = false;
          eval_scratch.cols.resize(columns.size());
          for (std::size_t c = 0; c < columns.size(); ++c)
            eval_scratch.cols[c] = lookup->outcomes[c][id];
          return &eval_scratch;
        }
        eval_scratch = evaluate_game(game_scratch, solution_concept, columns);
        return &eval_scratch;
    }
    return nullptr;
  }
};

EvalContext make_context(const ResolvedDraws& resolved, const CounterfactualSpec& spec,
                         std::span<const ColumnSpec> columns,
                         const EngineOptions& opts) {
  EvalContext ctx;
  ctx.resolved = &resolved;
  ctx.solution_concept = spec.solution_concept;
  ctx.columns = columns;
  if (opts.lookup) {
    if (resolved.mode != ResolvedDraws::Mode::parametric)
      throw ConfigError("grid-lookup mode needs a parametric distribution");
    if (opts.lookup->columns.size() != columns.size())
      throw ConfigError("lookup table columns do not match the requested columns");
    ctx.lookup = opts.lookup;
    // Diagnostic: the grid should bracket the 6-sigma box of every free
    // coordinate induced by the distribution at this theta.
    auto slots = free_coordinate_slots(spec.actions);
    std::vector<Count> tuple(spec.actions.num_players());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      auto [i, p] = slots[k];
      spec.actions.profile_tuple_into(p, tuple);
      double mean = resolved.params.alpha[i] + resolved.pdist.epsilon[i].location();
      double var = resolved.pdist.epsilon[i].scale() * resolved.pdist.epsilon[i].scale();
      for (std::size_t c = 0; c < resolved.covariates; ++c) {
        mean += resolved.pdist.x[i][c].location() * resolved.params.beta[i][c];
        double s = resolved.pdist.x[i][c].scale() * resolved.params.beta[i][c];
        var += s * s;
      }
      for (std::size_t j = 0; j < spec.actions.num_players(); ++j)
        if (j != i && tuple[j] != 0) mean += resolved.params.delta[i][j];
      double sd = std::sqrt(var);
      auto [lo, hi] = ctx.lookup->grid.hull(k);
      if (mean - 6.0 * sd < lo || mean + 6.0 * sd > hi) ctx.coverage_warning = true;
    }
  }
  if (resolved.mode == ResolvedDraws::Mode::discrete) {
    ctx.support_cache.reserve(resolved.support->games.size());
    for (const auto& g : resolved.support->games)
      ctx.support_cache.push_back(evaluate_game(g, spec.solution_concept, columns));
  }
  if (resolved.mode == ResolvedDraws::Mode::degenerate)
    ctx.degenerate_cache = evaluate_game(resolved.fixed_game, spec.solution_concept, columns);
  return ctx;
}

void throw_pending(const PendingError& err) {
  if (err.kind == PendingError::Kind::emptiness)
    throw EmptinessError(err.msg, err.draw);
  throw Error(err.cls.empty() ? "internal" : err.cls, err.msg);
}

std::vector<PartialCpds> exact_aggregate(const CounterfactualSpec& spec,
                                         const ResolvedDraws& resolved,
                                         std::span<const ColumnSpec> columns,
                                         const EngineOptions& opts) {
  if (resolved.mode == ResolvedDraws::Mode::parametric)
    throw ConfigError("exact mode needs a discrete (or degenerate) distribution");
  std::vector<std::pair<const DrawEval*, double>> weighted;
  EvalContext ctx = make_context(resolved, spec, columns, opts);
  if (resolved.mode == ResolvedDraws::Mode::discrete) {
    for (std::size_t k = 0; k < ctx.support_cache.size(); ++k)
      weighted.emplace_back(&ctx.support_cache[k], resolved.probs[k]);
  } else {
    weighted.emplace_back(&ctx.degenerate_cache, 1.0);
  }

  double excluded_weight = 0.0;
  std::uint64_t excluded = 0;
  for (std::size_t k = 0; k < weighted.size(); ++k) {
    if (weighted[k].first->empty) {
      if (!opts.record_empty && weighted[k].second > 0.0)
        throw EmptinessError("support point " + std::to_string(k) +
                                 " has an empty solution set",
                             k);
      excluded_weight += weighted[k].second;
      ++excluded;
    }
  }
  const double included_weight = 1.0 - excluded_weight;

  std::vector<PartialCpds> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    PartialCpds r;
    r.exact = true;
    r.n_draws = weighted.size();
    r.excluded_draws = excluded;
    r.exclusion_rate = excluded_weight;
    r.partitions = 1;
    if (included_weight > 0.0) {
      double sup = 0, inf = 0, could = 0, must = 0;
      bool saw_events = false;
      std::uint64_t indet = 0;
      for (const auto& [ev, w] : weighted) {
        if (ev->empty || w == 0.0) continue;
        const DrawOutcome& o = ev->cols[c];
        sup += w * o.hi;
        inf += w * o.lo;
        if (o.could.has_value()) {
          saw_events = true;
          if (*o.could) could += w;
        }
        if (o.must.has_value()) {
          if (*o.must == Tribool::yes) must += w;
          if (*o.must == Tribool::indeterminate) ++indet;
        }
      }
      r.e_sup = sup / included_weight;
      r.e_inf = inf / included_weight;
      r.indeterminate_draws = indet;
      if (saw_events) {
        r.p_could = could / included_weight;
        r.p_must = must / included_weight;
        r.p_cannot = 1.0 - r.p_could;
      }
    }
    out[c] = r;
  }
  return out;
}

std::vector<PartialCpds> mc_aggregate(const CounterfactualSpec& spec,
                                      const ResolvedDraws& resolved,
                                      std::span<const ColumnSpec> columns,
                                      std::uint64_t n, std::uint64_t seed,
                                      const EngineOptions& opts, bool parallel,
                                      std::uint32_t partitions) {
  if (n < 1) throw ConfigError("need at least one draw");
  if (partitions < 1) throw ConfigError("need at least one partition");
  EvalContext ctx = make_context(resolved, spec, columns, opts);

  const std::size_t ncols = columns.size();
  const std::uint64_t P = partitions;
  std::vector<std::vector<ColumnAccum>> accums(P, std::vector<ColumnAccum>(ncols));
  std::vector<std::uint64_t> excluded(P, 0);
  std::vector<PendingError> errors(P);

#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(P); ++pi) {
    const std::uint64_t p = static_cast<std::uint64_t>(pi);
    const std::uint64_t lo = n * p / P;
    const std::uint64_t hi = n * (p + 1) / P;
    Game game_scratch;
    LinearEntryGameParams param_scratch;
    DrawEval eval_scratch;
    auto& acc = accums[p];
    try {
      for (std::uint64_t i = lo; i < hi; ++i) {
        const DrawEval* ev =
            ctx.eval_at(i, seed, game_scratch, param_scratch, eval_scratch);
        if (ev->empty) {
          if (!opts.record_empty) {
            errors[p] = {PendingError::Kind::emptiness, i, "emptiness",
                         "draw " + std::to_string(i) +
                             " has an empty solution set under the chosen concept"};
            break;
          }
          ++excluded[p];
          continue;
        }
        for (std::size_t c = 0; c < ncols; ++c) acc[c].add(ev->cols[c]);
      }
    } catch (const Error& e) {
      errors[p] = {PendingError::Kind::other, lo, e.error_class(), e.what()};
    } catch (const std::exception& e) {
      errors[p] = {PendingError::Kind::other, lo, "internal", e.what()};
    }
  }

  for (const auto& err : errors)
    if (err.kind != PendingError::Kind::none) throw_pending(err);

  std::vector<ColumnAccum> total(ncols);
  std::uint64_t total_excluded = 0;
  for (std::uint64_t p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < ncols; ++c) total[c].merge(accums[p][c]);
    total_excluded += excluded[p];
  }
  const std::uint64_t n_eff = n - total_excluded;
  std::vector<PartialCpds> out(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    out[c] = finalize_mc(total[c], n, total_excluded, n_eff, partitions);
    out[c].lookup_coverage_warning = ctx.coverage_warning;
  }
  return out;
}

}  // namespace

std::vector<PartialCpds> partial_cpds_multi(const CounterfactualSpec& spec,
                                            std::span<const ColumnSpec> columns,
                                            std::span<const double> theta,
                                            std::uint64_t n, std::uint64_t seed,
                                            const EngineOptions& opts) {
  ResolvedDraws resolved = resolve_at_theta(spec, theta);
  if (opts.exact) return exact_aggregate(spec, resolved, columns, opts);
  return mc_aggregate(spec, resolved, columns, n, seed, opts, opts.parallel,
                      opts.partitions);
}

PartialCpds partial_cpds(const CounterfactualSpec& spec, std::span<const double> theta,
                         std::uint64_t n, std::uint64_t seed,
                         const EngineOptions& opts) {
  std::vector<ColumnSpec> cols{{spec.outcome.name, spec.outcome, spec.events}};
  return partial_cpds_multi(spec, cols, theta, n, seed, opts)[0];
}

std::vector<PartialCpds> partial_cpds_multi_serial(
    const CounterfactualSpec& spec, std::span<const ColumnSpec> columns,
    std::span<const double> theta, std::uint64_t n, std::uint64_t seed,
    const EngineOptions& opts) {
  ResolvedDraws resolved = resolve_at_theta(spec, theta);
  if (opts.exact) return exact_aggregate(spec, resolved, columns, opts);
  return mc_aggregate(spec, resolved, columns, n, seed, opts, false, 1);
}

PartialCpds partial_cpds_serial(const CounterfactualSpec& spec,
                                std::span<const double> theta, std::uint64_t n,
                                std::uint64_t seed, const EngineOptions& opts) {
  std::vector<ColumnSpec> cols{{spec.outcome.name, spec.outcome, spec.events}};
  return partial_cpds_multi_serial(spec, cols, theta, n, seed, opts)[0];
}

std::vector<std::vector<PartialCpds>> sweep_multi(
    const CounterfactualSpec& spec, std::span<const ColumnSpec> columns,
    const std::vector<std::vector<double>>& thetas, std::uint64_t n,
    std::uint64_t seed, const EngineOptions& opts) {
  if (thetas.empty()) throw ConfigError("sweep needs at least one theta value");
  std::vector<std::vector<PartialCpds>> out;
  out.reserve(thetas.size());
  for (const auto& theta : thetas)
    out.push_back(partial_cpds_multi(spec, columns, theta, n, seed, opts));
  return out;
}

std::vector<PartialCpds> sweep(const CounterfactualSpec& spec,
                               const std::vector<std::vector<double>>& thetas,
                               std::uint64_t n, std::uint64_t seed,
                               const EngineOptions& opts) {
  std::vector<ColumnSpec> cols{{spec.outcome.name, spec.outcome, spec.events}};
  auto multi = sweep_multi(spec, cols, thetas, n, seed, opts);
  std::vector<PartialCpds> out;
  out.reserve(multi.size());
  for (auto& row : multi) out.push_back(row[0]);
  return out;
}

}  // namespace cpds
