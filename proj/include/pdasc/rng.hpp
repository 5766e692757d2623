#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "pdasc/errors.hpp"

namespace pdasc {

// SplitMix64 (Steele/Lea/Flood) is the project's fixed generator. Every
// random quantity produced by the library is a pure function of a 64-bit
// seed and this algorithm, so seeded runs reproduce exactly; no standard
// <random> distribution is used because the standard does not pin their
// algorithms across implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // First uniform shifted into (0, 1] so the log stays finite.
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, bound). Modulo bias is irrelevant at the
  // index ranges used here (bound << 2^64).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // Fair coin; true with probability 1/2.
  bool coin() { return (next() >> 63) != 0; }

  // Derives an independent stream seed from (seed, stream) so one master
  // seed can drive several uncorrelated generators.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xA0761D6478BD642FULL * (stream + 1)));
    return g.next();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// k distinct indices drawn uniformly from {0, ..., population-1}, sorted
// ascending (partial Fisher-Yates).
inline std::vector<int> sample_without_replacement(int population, int k, SplitMix64& rng) {
  if (k < 0 || k > population)
    throw DimensionError("sample_without_replacement: need 0 <= k <= population");
  std::vector<int> pool(static_cast<std::size_t>(population));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(population - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pdasc
