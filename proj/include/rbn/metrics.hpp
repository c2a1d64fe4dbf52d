#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbn/evolution.hpp"

namespace rbn {

/// Performance measures of r runs trained on a fraction s of the input space.
struct MeasurePoint {
  double s = 0.0;
  std::uint32_t runs = 0;          // r
  double alpha = 0.0;              // Pr(f = 1), perfect training likelihood
  double alpha_prime = 0.0;        // Pr(g = 1)
  std::optional<double> delta;     // Pr(g = 1 | f = 1), learning probability; empty when alpha = 0
  double beta = 0.0;               // mean f_final, training score
  double beta_prime = 0.0;         // mean g_final, generalization score
};

enum class Measure { LearningProbability, TrainingLikelihood, GeneralizationLikelihood, TrainingScore, GeneralizationScore };

std::string to_string(Measure measure);
Measure parse_measure(const std::string& text);

/// f = 1 test with tolerance 1/(2 m O): scores are multiples of 1/(m O).
bool perfect_training(const RunRecord& run);
bool perfect_generalization(const RunRecord& run);

/// Throws InvalidSpecError on an empty run list.
MeasurePoint aggregate(std::span<const RunRecord> runs, double s);

/// Ordered measure points with strictly increasing s in (0, 1].
class MeasureCurve {
 public:
  MeasureCurve() = default;
  explicit MeasureCurve(std::vector<MeasurePoint> points);

  std::span<const MeasurePoint> points() const noexcept { return points_; }
  std::optional<double> value(std::size_t i, Measure measure) const;

 private:
  std::vector<MeasurePoint> points_;
};

struct CumulativeResult {
  double area = 0.0;
  std::uint32_t dropped = 0;  // points with an undefined value
};

/// Trapezoid rule over (x, y); x must be non-decreasing.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Area under a measure curve. Undefined learning-probability points are
/// dropped and the area over the remaining span is rescaled to the full
/// s-span of the curve. Throws InvalidSpecError with fewer than two defined
/// points.
CumulativeResult cumulative(const MeasureCurve& curve, Measure measure);

/// Training sample sizes for the s-grid: every m in [1, m'] when m' is at
/// most `max_points`, otherwise `max_points` evenly spaced sizes ending at m'.
std::vector<std::uint64_t> default_sample_sizes(std::uint64_t input_space, std::uint32_t max_points = 32);

/// CSV header s,r,alpha,alpha_prime,delta,beta,beta_prime (delta blank when undefined).
void write_curve_csv(std::ostream& out, const MeasureCurve& curve, bool header = true);
std::string curve_row(const MeasurePoint& point);

}  // namespace rbn
