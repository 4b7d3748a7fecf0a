#include "cpds/distribution.hpp"

#include <cmath>
#include <numeric>

#include "cpds/errors.hpp"
#include "cpds/rng.hpp"

namespace cpds {

void ScalarDist::validate() const {
  switch (kind) {
    case Kind::point:
      break;
    case Kind::normal:
      if (!(sd >= 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
        throw ConfigError("normal distribution needs finite mean and sd >= 0");
      break;
    case Kind::empirical:
      if (samples.empty()) throw ConfigError("empirical distribution needs samples");
      break;
  }
}

double ScalarDist::draw(std::uint64_t seed, std::uint64_t index, std::uint64_t dim) const {
  switch (kind) {
    case Kind::point:
      return value;
    case Kind::normal:
      return mean + sd * rng::normal_quantile(rng::uniform01(seed, index, dim));
    case Kind::empirical: {
      double u = rng::uniform01(seed, index, dim);
      auto k = static_cast<std::size_t>(u * static_cast<double>(samples.size()));
      if (k >= samples.size()) k = samples.size() - 1;
      return samples[k];
    }
  }
  return 0.0;
}

double ScalarDist::location() const {
  switch (kind) {
    case Kind::point: return value;
    case Kind::normal: return mean;
    case Kind::empirical:
      return std::accumulate(samples.begin(), samples.end(), 0.0) /
             static_cast<double>(samples.size());
  }
  return 0.0;
}

double ScalarDist::scale() const {
  switch (kind) {
    case Kind::point: return 0.0;
    case Kind::normal: return sd;
    case Kind::empirical: {
      double m = location();
      double s = 0.0;
      for (double v : samples) s += (v - m) * (v - m);
      return std::sqrt(s / static_cast<double>(samples.size()));
    }
  }
  return 0.0;
}

void ParametricDist::validate(std::size_t players, std::size_t covariates) const {
  if (x.size() != players || epsilon.size() != players)
    throw ConfigError("parametric distribution player count mismatch");
  for (const auto& row : x) {
    if (row.size() != covariates)
      throw ConfigError("parametric distribution covariate count mismatch");
    for (const auto& d : row) d.validate();
  }
  for (const auto& d : epsilon) d.validate();
}

void DiscreteSupport::validate() const {
  if (games.empty()) throw ConfigError("discrete support is empty");
  if (games.size() != probs.size())
    throw ConfigError("discrete support games/probs length mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ConfigError("discrete support probabilities must be >= 0");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw ConfigError("discrete support probabilities must sum to 1");
  const ActionSpace& a0 = games[0].actions;
  for (const auto& g : games) {
    g.validate();
    if (!(g.actions == a0))
      throw ConfigError("discrete support games disagree on action space");
  }
}

ThetaBinding::Target binding_target_from_string(const std::string& s) {
  if (s == "alpha") return ThetaBinding::Target::alpha;
  if (s == "beta") return ThetaBinding::Target::beta;
  if (s == "delta") return ThetaBinding::Target::delta;
  if (s == "eps_sd") return ThetaBinding::Target::eps_sd;
  if (s == "tensor_entry") return ThetaBinding::Target::tensor_entry;
  throw ConfigError("unknown binding target '" + s + "'");
}

const char* binding_target_name(ThetaBinding::Target t) {
  switch (t) {
    case ThetaBinding::Target::alpha: return "alpha";
    case ThetaBinding::Target::beta: return "beta";
    case ThetaBinding::Target::delta: return "delta";
    case ThetaBinding::Target::eps_sd: return "eps_sd";
    case ThetaBinding::Target::tensor_entry: return "tensor_entry";
  }
  return "?";
}

}  // namespace cpds
