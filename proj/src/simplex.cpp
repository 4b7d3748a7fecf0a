#include "cpds/simplex.hpp"

#include <cmath>
#include <limits>

#include "cpds/errors.hpp"

namespace cpds {
namespace {

constexpr double kPivotTol = 1e-9;

struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // variables, excluding rhs
  std::vector<std::vector<double>> a;  // rows x (cols + 1); last entry is rhs
  std::vector<int> basis;              // basic variable per row
  std::size_t structural = 0;          // original variable count
  std::size_t first_artificial = 0;    // columns >= this are artificial

  void pivot(std::size_t row, std::size_t col) {
    double inv = 1.0 / a[row][col];
    for (auto& v : a[row]) v *= inv;
    a[row][col] = 1.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row) continue;
      double f = a[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) a[i][j] -= f * a[row][j];
      a[i][col] = 0.0;
      if (a[i][cols] < 0.0 && a[i][cols] > -kPivotTol) a[i][cols] = 0.0;
    }
    basis[row] = static_cast<int>(col);
  }

  // Reduced cost of a column against the current basis, recomputed from the
  // tableau every time. Incremental cost-row updates drift badly under the
  // degenerate pivots these polytopes produce (most right-hand sides are 0);
  // at a few dozen variables the recomputation costs nothing.
  double reduced_cost(const std::vector<double>& c, std::size_t j) const {
    double r = c[j];
    for (std::size_t i = 0; i < rows; ++i) {
      double cb = c[basis[i]];
      if (cb != 0.0) r -= cb * a[i][j];
    }
    return r;
  }

  // Bland: entering column is the lowest-index one with a negative reduced
  // cost; leaving row is the ratio-test minimum with lowest basic index.
  LpStatus run(const std::vector<double>& cost, bool allow_artificial_entering) {
    const std::size_t limit = allow_artificial_entering ? cols : first_artificial;
    const std::size_t max_iterations = 2000 * (rows + cols + 1);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced_cost(cost, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return LpStatus::optimal;
      // Ratio test. Ties are endemic here (most right-hand sides are zero);
      // among tied rows take the largest pivot element, which keeps the
      // eliminations well conditioned, then the lowest basic index.
      std::size_t leave = rows;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        if (a[i][enter] <= kPivotTol) continue;
        double ratio = a[i][cols] / a[i][enter];
        bool take;
        if (leave == rows || ratio < best_ratio - kPivotTol)
          take = true;
        else if (ratio < best_ratio + kPivotTol)
          take = a[i][enter] > a[leave][enter] ||
                 (a[i][enter] == a[leave][enter] && basis[i] < basis[leave]);
        else
          take = false;
        if (take) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == rows) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    throw Error("internal", "simplex iteration cap exceeded");
  }
};

LpResult solve_impl(const Polyhedron& poly, std::span<const double> objective,
                    bool maximize, bool feasibility_only) {
  const std::size_t n = poly.dim;
  const std::size_t n_le = poly.le.size();
  const std::size_t m = n_le + poly.eq.size();

  Tableau t;
  t.rows = m;
  t.structural = n;
  // columns: structural | slacks | artificials (one per row, unused ones
  // never referenced)
  t.first_artificial = n + n_le;
  t.cols = t.first_artificial + m;
  t.a.assign(m, std::vector<double>(t.cols + 1, 0.0));
  t.basis.assign(m, -1);

  // Rows are equilibrated to unit max coefficient so the pivot and
  // feasibility tolerances are scale-free; the feasible set is unchanged.
  auto fill_row = [&](std::size_t row, const LinearConstraint& c) {
    if (c.coeffs.size() != n) throw DimensionError("constraint row length != dimension");
    double scale = 0.0;
    for (double v : c.coeffs) scale = std::max(scale, std::fabs(v));
    double inv = scale > 0.0 ? 1.0 / scale : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.a[row][j] = c.coeffs[j] * inv;
    t.a[row][t.cols] = c.rhs * inv;
  };
  std::size_t row = 0;
  for (std::size_t k = 0; k < n_le; ++k, ++row) {
    fill_row(row, poly.le[k]);
    t.a[row][n + k] = 1.0;
  }
  for (std::size_t k = 0; k < poly.eq.size(); ++k, ++row) fill_row(row, poly.eq[k]);

  // Normalize to rhs >= 0, then give each row a basic variable: its slack when
  // that still carries +1, otherwise an artificial.
  std::vector<bool> has_artificial(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.a[i][t.cols] < 0.0)
      for (auto& v : t.a[i]) v = -v;
    bool slack_ok = i < n_le && t.a[i][n + i] > 0.5;
    if (slack_ok) {
      t.basis[i] = static_cast<int>(n + i);
    } else {
      t.a[i][t.first_artificial + i] = 1.0;
      t.basis[i] = static_cast<int>(t.first_artificial + i);
      has_artificial[i] = true;
    }
  }

  // Phase 1: minimize the sum of artificials.
  bool need_phase1 = false;
  for (bool h : has_artificial) need_phase1 = need_phase1 || h;
  if (need_phase1) {
    std::vector<double> cost(t.cols + 1, 0.0);
    for (std::size_t j = t.first_artificial; j < t.cols; ++j) cost[j] = 1.0;
    t.run(cost, true);
    double infeas = 0.0;  // leftover artificial mass, read off the tableau
    for (std::size_t i = 0; i < m; ++i)
      if (t.basis[i] >= static_cast<int>(t.first_artificial))
        infeas += t.a[i][t.cols];
    if (infeas > kLpTol) return {LpStatus::infeasible, 0.0, {}};
    // Pivot remaining basic artificials out; rows where that is impossible
    // are redundant (numerically zero) and get dropped so phase 2 never
    // touches an artificial again.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] < static_cast<int>(t.first_artificial)) continue;
      for (std::size_t j = 0; j < t.first_artificial; ++j) {
        if (std::fabs(t.a[i][j]) > kPivotTol) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t i = t.rows; i-- > 0;) {
      if (t.basis[i] >= static_cast<int>(t.first_artificial)) {
        t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
        --t.rows;
      }
    }
  }

  if (!feasibility_only) {
    std::vector<double> cost(t.cols + 1, 0.0);
    for (std::size_t j = 0; j < n && j < objective.size(); ++j)
      cost[j] = maximize ? -objective[j] : objective[j];
    LpStatus st = t.run(cost, false);
    if (st == LpStatus::unbounded) return {LpStatus::unbounded, 0.0, {}};
  }

  LpResult res;
  res.status = LpStatus::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i) {
    int b = t.basis[i];
    if (b >= 0 && b < static_cast<int>(n)) res.x[b] = t.a[i][t.cols];
  }
  double v = 0.0;
  for (std::size_t j = 0; j < n && j < objective.size(); ++j)
    v += objective[j] * res.x[j];
  res.value = v;
  return res;
}

}  // namespace

LpResult solve_lp(const Polyhedron& poly, std::span<const double> objective,
                  bool maximize) {
  return solve_impl(poly, objective, maximize, false);
}

LpResult lp_feasible(const Polyhedron& poly) {
  return solve_impl(poly, {}, false, true);
}

}  // namespace cpds
