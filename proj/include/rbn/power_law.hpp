#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace rbn {

/// K = a * N^b + c
struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual = 0.0;        // sum of squared errors in K
  std::uint32_t points = 0;
  bool degenerate = false;      // data carry no N dependence
  bool converged = true;        // false: best-so-far after the iteration limit

  double operator()(double n) const;
};

/// Least-squares fit: a grid over c, linear regression of log|K - c| on
/// log N for each candidate, then Levenberg-Marquardt refinement of
/// (a, b, c) from the best candidate. Refinement only accepts improving
/// steps. Needs at least 4 points with positive, not all equal, N;
/// throws InvalidSpecError otherwise.
PowerLawFit fit_power_law(std::span<const double> n, std::span<const double> k);

/// {"a":..,"b":..,"c":..,"residual":..,"n_points":..}
std::string to_json(const PowerLawFit& fit);

}  // namespace rbn
