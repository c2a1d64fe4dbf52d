#pragma once

#include <cstdint>
#include <random>

namespace rbn {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combines a parent seed with a key into a child seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(parent) ^ (key * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
}

/// Seeded random stream. All distributions are implemented here rather than
/// through <random> distribution objects so that draws are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson variate by inversion; intended for small means.
  std::uint32_t poisson(double mean);

  Rng split(std::uint64_t key) { return Rng(derive_seed(next(), key)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbn
