#include "cpds/solution.hpp"

#include <cmath>
#include <string>

#include "cpds/errors.hpp"

namespace cpds {

bool Solution::is_distribution(double tol) const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -tol)) return false;
    sum += p;
  }
  return std::fabs(sum - 1.0) <= tol * static_cast<double>(probs.size() ? probs.size() : 1);
}

void Solution::validate(double tol) const {
  if (!is_distribution(tol))
    throw DimensionError("solution is not a probability vector within tolerance");
}

double LinearFunctional::operator()(std::span<const double> probs) const {
  if (probs.size() != coeffs.size())
    throw DimensionError("functional dimension " + std::to_string(coeffs.size()) +
                         " != solution dimension " + std::to_string(probs.size()));
  double v = constant;
  for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * probs[i];
  return v;
}

bool Polyhedron::contains(std::span<const double> point, double tol) const {
  if (point.size() != dim) return false;
  for (double p : point)
    if (p < -tol) return false;
  for (const auto& c : le) {
    double v = 0.0;
    for (std::size_t i = 0; i < dim; ++i) v += c.coeffs[i] * point[i];
    if (v > c.rhs + tol) return false;
  }
  for (const auto& c : eq) {
    double v = 0.0;
    for (std::size_t i = 0; i < dim; ++i) v += c.coeffs[i] * point[i];
    if (std::fabs(v - c.rhs) > tol) return false;
  }
  return true;
}

Polyhedron simplex_polyhedron(std::size_t dim) {
  Polyhedron poly;
  poly.dim = dim;
  for (std::size_t k = 0; k < dim; ++k) {
    LinearConstraint nonneg;
    nonneg.coeffs.assign(dim, 0.0);
    nonneg.coeffs[k] = -1.0;
    nonneg.rhs = 0.0;
    poly.le.push_back(std::move(nonneg));
  }
  LinearConstraint sum;
  sum.coeffs.assign(dim, 1.0);
  sum.rhs = 1.0;
  poly.eq.push_back(std::move(sum));
  return poly;
}

}  // namespace cpds
