#include "cpds/concepts.hpp"

#include <algorithm>
#include <cmath>

#include "cpds/errors.hpp"
#include "cpds/simplex.hpp"

namespace cpds {
namespace {

constexpr double kKnifeEdgeTol = 1e-10;

std::vector<std::size_t> profile_strides(const ActionSpace& actions) {
  const auto& sizes = actions.sizes();
  std::vector<std::size_t> strides(sizes.size(), 1);
  for (std::size_t i = sizes.size(); i-- > 1;)
    strides[i - 1] = strides[i] * sizes[i];
  return strides;
}

Solution degenerate_solution(std::size_t profiles, std::size_t at) {
  Solution s;
  s.probs.assign(profiles, 0.0);
  s.probs[at] = 1.0;
  return s;
}

}  // namespace

Concept concept_from_string(const std::string& name) {
  if (name == "psne") return Concept::psne;
  if (name == "mixed2x2") return Concept::mixed2x2;
  if (name == "ce") return Concept::ce;
  throw ConfigError("unknown solution concept '" + name + "'");
}

const char* concept_name(Concept c) {
  switch (c) {
    case Concept::psne: return "psne";
    case Concept::mixed2x2: return "mixed2x2";
    case Concept::ce: return "ce";
  }
  return "?";
}

SolutionSet enumerate_psne(const Game& game) {
  const auto& actions = game.actions;
  const std::size_t profiles = actions.num_profiles();
  const std::size_t players = actions.num_players();
  const auto strides = profile_strides(actions);

  std::vector<Solution> out;
  std::vector<Count> tuple(players);
  for (std::size_t p = 0; p < profiles; ++p) {
    actions.profile_tuple_into(p, tuple);
    bool equilibrium = true;
    for (std::size_t i = 0; i < players && equilibrium; ++i) {
      const double here = game.utility[i][p];
      const std::size_t base = p - tuple[i] * strides[i];
      for (Count a = 0; a < actions.size(i); ++a) {
        if (a == tuple[i]) continue;
        if (game.utility[i][base + a * strides[i]] > here) {
          equilibrium = false;
          break;
        }
      }
    }
    if (equilibrium) out.push_back(degenerate_solution(profiles, p));
  }
  return SolutionSet::from_vertices(std::move(out));
}

SolutionSet solve_mixed_ne_2x2(const Game& game) {
  const auto& actions = game.actions;
  if (actions.num_players() != 2 || actions.size(0) != 2 || actions.size(1) != 2)
    throw UnsupportedError("mixed-strategy solver handles 2-player 2-action games only");

  SolutionSet set = enumerate_psne(game);
  auto& vertices = std::get<std::vector<Solution>>(set.rep);
  int knife_edges = 0;

  // Player 2's indifference pins p1 = P(player 1 plays 1); player 1's pins p2.
  // Profiles index as (a1, a2) -> 2*a1 + a2.
  const auto& u1 = game.utility[0];
  const auto& u2 = game.utility[1];
  const double a2_gap_out = u2[0] - u2[1];  // player 2's gap when player 1 is out
  const double a2_gap_in = u2[2] - u2[3];
  const double a1_gap_out = u1[0] - u1[2];  // player 1's gap when player 2 is out
  const double a1_gap_in = u1[1] - u1[3];
  const double d1 = a2_gap_out - a2_gap_in;
  const double d2 = a1_gap_out - a1_gap_in;

  bool have_interior = false;
  double p1 = 0.0, p2 = 0.0;
  if (std::fabs(d1) <= kKnifeEdgeTol || std::fabs(d2) <= kKnifeEdgeTol) {
    // A player is indifferent for every opposing mix, or the indifference
    // equations are degenerate; any equilibria beyond the pure ones form
    // continua, which are excluded by design.
    if ((std::fabs(d1) <= kKnifeEdgeTol && std::fabs(a2_gap_out) <= kKnifeEdgeTol) ||
        (std::fabs(d2) <= kKnifeEdgeTol && std::fabs(a1_gap_out) <= kKnifeEdgeTol))
      ++knife_edges;
  } else {
    p1 = a2_gap_out / d1;
    p2 = a1_gap_out / d2;
    if (p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0) {
      if (std::min({p1, 1.0 - p1, p2, 1.0 - p2}) <= kKnifeEdgeTol)
        ++knife_edges;  // boundary-touching candidate, excluded
      else
        have_interior = true;
    }
  }
  if (have_interior) {
    Solution s;
    s.probs = {(1.0 - p1) * (1.0 - p2), (1.0 - p1) * p2, p1 * (1.0 - p2), p1 * p2};
    vertices.push_back(std::move(s));
  }
  set.knife_edge_count = knife_edges;
  return set;
}

SolutionSet ce_constraints(const Game& game) {
  const auto& actions = game.actions;
  const std::size_t profiles = actions.num_profiles();
  const std::size_t players = actions.num_players();
  const auto strides = profile_strides(actions);

  Polyhedron poly;
  poly.dim = profiles;
  std::vector<Count> tuple(players);
  // Obedience: recommended action a must beat each deviation a', conditional
  // on being recommended a. Stored negated so rows read coeffs.s <= 0.
  for (std::size_t i = 0; i < players; ++i) {
    for (Count a = 0; a < actions.size(i); ++a) {
      for (Count dev = 0; dev < actions.size(i); ++dev) {
        if (dev == a) continue;
        LinearConstraint row;
        row.coeffs.assign(profiles, 0.0);
        row.rhs = 0.0;
        for (std::size_t p = 0; p < profiles; ++p) {
          actions.profile_tuple_into(p, tuple);
          if (tuple[i] != a) continue;
          const std::size_t dev_profile = p - a * strides[i] + dev * strides[i];
          row.coeffs[p] = -(game.utility[i][p] - game.utility[i][dev_profile]);
        }
        poly.le.push_back(std::move(row));
      }
    }
  }
  Polyhedron simplex = simplex_polyhedron(profiles);
  for (auto& c : simplex.le) poly.le.push_back(std::move(c));
  for (auto& c : simplex.eq) poly.eq.push_back(std::move(c));
  return SolutionSet::from_polyhedron(std::move(poly));
}

Optimum maximize_over(const SolutionSet& set, const LinearFunctional& f,
                      Direction direction) {
  const bool maximize = direction == Direction::maximize;
  if (set.holds_vertices()) {
    const auto& vertices = set.vertices();
    if (vertices.empty())
      throw EmptinessError("solution set is empty; the chosen concept has no solution");
    std::size_t best = 0;
    double best_value = f(vertices[0]);
    for (std::size_t k = 1; k < vertices.size(); ++k) {
      double v = f(vertices[k]);
      if (maximize ? v > best_value : v < best_value) {
        best_value = v;
        best = k;
      }
    }
    return {best_value, vertices[best]};
  }
  const Polyhedron& poly = set.polyhedron();
  LpResult res = solve_lp(poly, f.coeffs, maximize);
  if (res.status == LpStatus::infeasible)
    throw EmptinessError("solution polyhedron is infeasible");
  if (res.status == LpStatus::unbounded)
    throw Error("internal", "unbounded optimum over a solution polytope");
  return {res.value + f.constant, Solution{std::move(res.x)}};
}

namespace {

// Region rows applied to a convex combination of the vertices: rewrite each
// row over profile space as a row over combination weights.
Polyhedron weights_polyhedron(const std::vector<Solution>& vertices,
                              const Polyhedron& region) {
  const std::size_t k = vertices.size();
  Polyhedron poly;
  poly.dim = k;
  auto transform = [&](const LinearConstraint& c) {
    LinearConstraint out;
    out.coeffs.assign(k, 0.0);
    out.rhs = c.rhs;
    for (std::size_t j = 0; j < k; ++j) {
      double v = 0.0;
      for (std::size_t p = 0; p < c.coeffs.size(); ++p)
        v += c.coeffs[p] * vertices[j].probs[p];
      out.coeffs[j] = v;
    }
    return out;
  };
  for (const auto& c : region.le) poly.le.push_back(transform(c));
  for (const auto& c : region.eq) poly.eq.push_back(transform(c));
  LinearConstraint unit;
  unit.coeffs.assign(k, 1.0);
  unit.rhs = 1.0;
  poly.eq.push_back(std::move(unit));
  return poly;
}

void check_region_dim(const SolutionSet& set, const Polyhedron& region) {
  std::size_t dim = set.holds_vertices()
                        ? (set.vertices().empty() ? region.dim
                                                  : set.vertices()[0].probs.size())
                        : set.polyhedron().dim;
  if (region.dim != dim)
    throw DimensionError("region dimension does not match the solution space");
}

bool in_union(const RegionUnion& regions, std::span<const double> point) {
  for (const auto& r : regions)
    if (r.contains(point)) return true;
  return false;
}

// Support-function containment of co(set) in one convex component. Returns the
// witness point that violates a row when the answer is no.
bool contained_in_component(const SolutionSet& set, const Polyhedron& component,
                            std::vector<double>* witness) {
  auto extreme = [&](const std::vector<double>& coeffs, bool maximize) {
    return maximize_over(set, LinearFunctional{coeffs, 0.0},
                         maximize ? Direction::maximize : Direction::minimize);
  };
  for (const auto& c : component.le) {
    Optimum hi = extreme(c.coeffs, true);
    if (hi.value > c.rhs + kLpTol) {
      if (witness) *witness = hi.arg.probs;
      return false;
    }
  }
  for (const auto& c : component.eq) {
    Optimum hi = extreme(c.coeffs, true);
    if (hi.value > c.rhs + kLpTol) {
      if (witness) *witness = hi.arg.probs;
      return false;
    }
    Optimum lo = extreme(c.coeffs, false);
    if (lo.value < c.rhs - kLpTol) {
      if (witness) *witness = lo.arg.probs;
      return false;
    }
  }
  return true;
}

}  // namespace

bool intersects(const SolutionSet& set, const Polyhedron& region) {
  check_region_dim(set, region);
  if (set.holds_vertices()) {
    const auto& vertices = set.vertices();
    if (vertices.empty())
      throw EmptinessError("solution set is empty; the chosen concept has no solution");
    // Fast path: some vertex already inside.
    for (const auto& v : vertices)
      if (region.contains(v.probs)) return true;
    return lp_feasible(weights_polyhedron(vertices, region)).status == LpStatus::optimal;
  }
  const Polyhedron& poly = set.polyhedron();
  Polyhedron joint = poly;
  for (const auto& c : region.le) joint.le.push_back(c);
  for (const auto& c : region.eq) joint.eq.push_back(c);
  if (lp_feasible(joint).status == LpStatus::optimal) return true;
  if (lp_feasible(poly).status != LpStatus::optimal)
    throw EmptinessError("solution polyhedron is infeasible");
  return false;
}

Tribool subset_of(const SolutionSet& set, const RegionUnion& regions) {
  if (regions.empty()) throw ConfigError("subset test needs at least one region");
  for (const auto& r : regions) check_region_dim(set, r);

  if (set.holds_vertices() && set.vertices().empty())
    throw EmptinessError("solution set is empty; the chosen concept has no solution");
  if (!set.holds_vertices() &&
      lp_feasible(set.polyhedron()).status != LpStatus::optimal)
    throw EmptinessError("solution polyhedron is infeasible");

  if (regions.size() == 1) {
    std::vector<double> witness;
    if (contained_in_component(set, regions[0], &witness)) return Tribool::yes;
    return in_union(regions, witness) ? Tribool::indeterminate : Tribool::no;
  }

  if (set.holds_vertices()) {
    const auto& vertices = set.vertices();
    for (const auto& component : regions) {
      bool all_inside = true;
      for (const auto& v : vertices)
        if (!component.contains(v.probs)) {
          all_inside = false;
          break;
        }
      if (all_inside) return Tribool::yes;  // hull of a convex component
    }
    for (const auto& v : vertices)
      if (!in_union(regions, v.probs)) return Tribool::no;
    return Tribool::indeterminate;
  }

  std::vector<std::vector<double>> witnesses;
  for (const auto& component : regions) {
    std::vector<double> witness;
    if (contained_in_component(set, component, &witness)) return Tribool::yes;
    witnesses.push_back(std::move(witness));
  }
  for (const auto& w : witnesses)
    if (!in_union(regions, w)) return Tribool::no;
  return Tribool::indeterminate;
}

}  // namespace cpds
