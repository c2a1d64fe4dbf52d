#include "rbn/power_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "json.hpp"
#include "rbn/error.hpp"

namespace rbn {

double PowerLawFit::operator()(double n) const { return a * std::pow(n, b) + c; }

namespace {

double sse(std::span<const double> n, std::span<const double> k, double a, double b, double c) {
  double total = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double r = a * std::pow(n[i], b) + c - k[i];
    total += r * r;
  }
  return total;
}

// Fits log|K - c| = log|a| + b log N for a fixed c; sign is the sign of a.
bool regress(std::span<const double> n, std::span<const double> k, double c, double sign, double& a, double& b) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto count = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double diff = sign * (k[i] - c);
    if (!(diff > 0.0)) return false;
    const double x = std::log(n[i]);
    const double y = std::log(diff);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return false;
  b = (count * sxy - sx * sy) / denom;
  a = sign * std::exp((sy - b * sx) / count);
  return std::isfinite(a) && std::isfinite(b);
}

// Solves the 3x3 system m x = rhs by Gaussian elimination with pivoting.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-300) return false;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double v = rhs[r];
    for (int c = r + 1; c < 3; ++c) v -= m[r][c] * x[c];
    x[r] = v / m[r][r];
  }
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> n, std::span<const double> k) {
  if (n.size() != k.size()) throw InvalidSpecError("power-law fit: N and K differ in length");
  if (n.size() < 4) throw InvalidSpecError("power-law fit needs at least 4 points");
  for (double v : n) {
    if (!(v > 0.0)) throw InvalidSpecError("power-law fit needs positive N");
  }
  const auto [n_min, n_max] = std::minmax_element(n.begin(), n.end());
  if (*n_min == *n_max) throw InvalidSpecError("power-law fit is degenerate: all N are equal");

  PowerLawFit fit;
  fit.points = static_cast<std::uint32_t>(n.size());
  const auto [k_lo, k_hi] = std::minmax_element(k.begin(), k.end());
  const double k_min = *k_lo;
  const double k_max = *k_hi;
  const double range = k_max - k_min;
  if (range <= 1e-12 * std::max(1.0, std::abs(k_max))) {
    fit.a = 0.0;
    fit.b = 0.0;
    fit.c = k_min;
    fit.residual = sse(n, k, 0.0, 0.0, k_min);
    fit.degenerate = true;
    return fit;
  }

  // Coarse search over c below the data (a > 0) and above it (a < 0).
  double best = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 400;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    for (int g = 0; g < kGrid; ++g) {
      const double offset = range * std::pow(10.0, -4.0 + 6.0 * g / (kGrid - 1));
      const double c = side == 0 ? k_min - offset : k_max + offset;
      double a = 0.0, b = 0.0;
      if (!regress(n, k, c, sign, a, b)) continue;
      const double err = sse(n, k, a, b, c);
      if (err < best) {
        best = err;
        fit.a = a;
        fit.b = b;
        fit.c = c;
      }
    }
  }
  if (!std::isfinite(best)) throw InvalidSpecError("power-law fit: no admissible starting point");

  // Levenberg-Marquardt refinement.
  double lambda = 1e-3;
  double current = best;
  fit.converged = false;
  for (int iter = 0; iter < 2000; ++iter) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double p = std::pow(n[i], fit.b);
      const double r = fit.a * p + fit.c - k[i];
      const std::array<double, 3> j{p, fit.a * p * std::log(n[i]), 1.0};
      for (int u = 0; u < 3; ++u) {
        jtr[u] += j[u] * r;
        for (int v = 0; v < 3; ++v) jtj[u][v] += j[u] * j[v];
      }
    }
    bool improved = false;
    while (lambda < 1e12) {
      auto damped = jtj;
      for (int u = 0; u < 3; ++u) damped[u][u] += lambda * std::max(jtj[u][u], 1e-12);
      std::array<double, 3> step{};
      if (solve3(damped, {-jtr[0], -jtr[1], -jtr[2]}, step)) {
        const double a = fit.a + step[0];
        const double b = fit.b + step[1];
        const double c = fit.c + step[2];
        const double err = sse(n, k, a, b, c);
        if (std::isfinite(err) && err < current) {
          const double gain = current - err;
          fit.a = a;
          fit.b = b;
          fit.c = c;
          current = err;
          lambda = std::max(lambda * 0.3, 1e-12);
          improved = true;
          if (gain <= 1e-14 * std::max(current, 1e-300) || current < 1e-28) fit.converged = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) {
      fit.converged = true;  // no descent direction left: local minimum
      break;
    }
    if (fit.converged) break;
  }
  fit.residual = current;
  return fit;
}

std::string to_json(const PowerLawFit& fit) {
  nlohmann::ordered_json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["c"] = fit.c;
  j["residual"] = fit.residual;
  j["n_points"] = fit.points;
  j["degenerate"] = fit.degenerate;
  j["converged"] = fit.converged;
  return j.dump();
}

}  // namespace rbn
