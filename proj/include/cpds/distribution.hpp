#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cpds/game.hpp"

namespace cpds {

// Marginal for one scalar utility determinant.
struct ScalarDist {
  enum class Kind { point, normal, empirical };
  Kind kind = Kind::point;
  double value = 0.0;               // point mass
  double mean = 0.0, sd = 0.0;      // normal
  std::vector<double> samples;      // empirical

  void validate() const;
  double draw(std::uint64_t seed, std::uint64_t index, std::uint64_t dim) const;
  // Mean and standard deviation (empirical: sample moments), for grid
  // coverage diagnostics.
  double location() const;
  double scale() const;
};

// Joint distribution of (x, epsilon) with independent components; epsilon is
// independent of x. Dependence between them would need a user-supplied joint
// sampler, which is out of scope for the built-in samplers.
struct ParametricDist {
  std::vector<std::vector<ScalarDist>> x;  // [player][covariate]
  std::vector<ScalarDist> epsilon;         // [player]

  void validate(std::size_t players, std::size_t covariates) const;
};

// Finite support of utility draws with exact weights. Weights may be bound to
// the parameter vector so that support probabilities vary over a sweep.
struct DiscreteSupport {
  std::vector<Game> games;
  std::vector<double> probs;
  bool weights_from_theta = false;

  void validate() const;
};

// A single deterministic draw: the utility template evaluated at theta as-is.
struct DegenerateDist {};

using UtilityDistribution = std::variant<DiscreteSupport, ParametricDist, DegenerateDist>;

// One theta coordinate feeding one slot of the utility template. player/col
// of -1 broadcast across all players/columns.
struct ThetaBinding {
  enum class Target { alpha, beta, delta, eps_sd, tensor_entry };
  std::string name;
  Target target = Target::alpha;
  int player = -1;
  int col = -1;      // covariate (beta) or opponent (delta)
  int profile = -1;  // tensor_entry
  double value = 0.0;  // default when not overridden by a sweep
};

ThetaBinding::Target binding_target_from_string(const std::string& s);
const char* binding_target_name(ThetaBinding::Target t);

struct LinearEntryTemplate {
  LinearEntryGameParams base;
  std::vector<ThetaBinding> bindings;
};

struct TensorTemplate {
  Game base;
  std::vector<ThetaBinding> bindings;
};

using UtilityMap = std::variant<LinearEntryTemplate, TensorTemplate>;

}  // namespace cpds
