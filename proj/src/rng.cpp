#include "rbn/rng.hpp"

#include <cmath>

namespace rbn {

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // Lemire's nearly divisionless rejection method.
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint32_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 64.0) {
    // Normal approximation; mutation rates this large are not meaningful.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double v = std::round(mean + std::sqrt(mean) * z);
    return v < 0.0 ? 0U : static_cast<std::uint32_t>(v);
  }
  const double limit = std::exp(-mean);
  std::uint32_t k = 0;
  double product = uniform01();
  while (product > limit) {
    ++k;
    product *= uniform01();
  }
  return k;
}

}  // namespace rbn
