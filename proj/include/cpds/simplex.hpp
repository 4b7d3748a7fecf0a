#pragma once

#include <span>
#include <vector>

#include "cpds/solution.hpp"

namespace cpds {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// Optimize objective . x over {x >= 0 : poly.le, poly.eq} with a dense
// two-phase tableau simplex. Bland's rule everywhere, so the method cannot
// cycle and ties resolve deterministically. Problems here have at most a few
// dozen variables, so no factorization machinery is warranted.
LpResult solve_lp(const Polyhedron& poly, std::span<const double> objective,
                  bool maximize);

// Phase-1 feasibility check; returns a feasible point when one exists.
LpResult lp_feasible(const Polyhedron& poly);

}  // namespace cpds
