#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace cpds {

inline constexpr double kSimplexTol = 1e-12;  // simplex-membership tolerance
inline constexpr double kLpTol = 1e-9;        // LP feasibility/optimality tolerance

// Joint distribution over action profiles.
struct Solution {
  std::vector<double> probs;

  void validate(double tol = kSimplexTol) const;
  bool is_distribution(double tol = kSimplexTol) const;
};

// Affine functional of a solution: coeffs . s + constant.
struct LinearFunctional {
  std::vector<double> coeffs;
  double constant = 0.0;

  double operator()(std::span<const double> probs) const;
  double operator()(const Solution& s) const { return (*this)(s.probs); }
};

struct LinearConstraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

// Convex polyhedron over profile probabilities: le rows mean coeffs.s <= rhs,
// eq rows mean coeffs.s == rhs. Coordinates are implicitly nonnegative in
// every use; builders that promise explicit simplex constraints append them.
struct Polyhedron {
  std::size_t dim = 0;
  std::vector<LinearConstraint> le;
  std::vector<LinearConstraint> eq;

  bool contains(std::span<const double> point, double tol = kLpTol) const;
};

// Region files describe a union of polyhedra; a single polyhedron is the
// common special case.
using RegionUnion = std::vector<Polyhedron>;

// A solution set is either an explicit vertex list (pure/mixed Nash) or a
// polyhedron in inequality form (correlated equilibrium). knife_edge_count
// reports how many exact-indifference continua were detected and excluded by
// the 2x2 mixed solver.
struct SolutionSet {
  std::variant<std::vector<Solution>, Polyhedron> rep;
  int knife_edge_count = 0;

  static SolutionSet from_vertices(std::vector<Solution> v) {
    return SolutionSet{std::move(v), 0};
  }
  static SolutionSet from_polyhedron(Polyhedron p) {
    return SolutionSet{std::move(p), 0};
  }

  bool holds_vertices() const {
    return std::holds_alternative<std::vector<Solution>>(rep);
  }
  const std::vector<Solution>& vertices() const {
    return std::get<std::vector<Solution>>(rep);
  }
  const Polyhedron& polyhedron() const { return std::get<Polyhedron>(rep); }
};

// Polyhedron of all distributions over `dim` profiles (nonnegativity rows
// plus the unit-sum equality).
Polyhedron simplex_polyhedron(std::size_t dim);

}  // namespace cpds
