#pragma once

#include <cmath>
#include <cstdint>

namespace cpds::rng {

// Stateless counter-based generator. Draw i always sees the same uniforms no
// matter which parameter value, thread, or partition evaluates it, which is
// what makes common random numbers across a parameter sweep (and bit-identical
// reruns) possible.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(a ^ 0x8000000000000001ull);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

// Uniform on the open interval (0,1); never returns 0 or 1 so inverse-CDF
// transforms stay finite.
inline double uniform01(std::uint64_t seed, std::uint64_t draw, std::uint64_t dim) {
  return (static_cast<double>(hash3(seed, draw, dim) >> 11) + 0.5) * 0x1.0p-53;
}

double normal_quantile(double p);  // inverse standard normal CDF
double normal_cdf(double x);

inline double normal_sample(std::uint64_t seed, std::uint64_t draw, std::uint64_t dim,
                            double mean, double sd) {
  return mean + sd * normal_quantile(uniform01(seed, draw, dim));
}

}  // namespace cpds::rng
