#include "rbn/metrics.hpp"

#include <algorithm>
#include <ostream>

#include "rbn/error.hpp"
#include "rbn/format.hpp"

namespace rbn {

std::string to_string(Measure measure) {
  switch (measure) {
    case Measure::LearningProbability:
      return "learning_probability";
    case Measure::TrainingLikelihood:
      return "training_likelihood";
    case Measure::GeneralizationLikelihood:
      return "generalization_likelihood";
    case Measure::TrainingScore:
      return "training_score";
    case Measure::GeneralizationScore:
      return "generalization_score";
  }
  return "unknown";
}

Measure parse_measure(const std::string& text) {
  for (auto m : {Measure::LearningProbability, Measure::TrainingLikelihood, Measure::GeneralizationLikelihood,
                 Measure::TrainingScore, Measure::GeneralizationScore}) {
    if (to_string(m) == text) return m;
  }
  throw ParseError("unknown measure '" + text + "'");
}

bool perfect_training(const RunRecord& run) {
  const double quantum = static_cast<double>(std::max<std::uint64_t>(1, run.sample_size)) * std::max(1U, run.outputs);
  return run.f_final >= 1.0 - 1.0 / (2.0 * quantum);
}

bool perfect_generalization(const RunRecord& run) {
  const double quantum = static_cast<double>(std::max<std::uint64_t>(1, run.input_space)) * std::max(1U, run.outputs);
  return run.g_final >= 1.0 - 1.0 / (2.0 * quantum);
}

MeasurePoint aggregate(std::span<const RunRecord> runs, double s) {
  if (runs.empty()) throw InvalidSpecError("cannot aggregate an empty run list");
  MeasurePoint point;
  point.s = s;
  point.runs = static_cast<std::uint32_t>(runs.size());
  std::uint32_t trained = 0, generalized = 0, both = 0;
  double f_sum = 0.0, g_sum = 0.0;
  for (const auto& run : runs) {
    const bool f_perfect = perfect_training(run);
    const bool g_perfect = perfect_generalization(run);
    trained += f_perfect;
    generalized += g_perfect;
    both += f_perfect && g_perfect;
    f_sum += run.f_final;
    g_sum += run.g_final;
  }
  const double r = static_cast<double>(runs.size());
  point.alpha = trained / r;
  point.alpha_prime = generalized / r;
  if (trained > 0) point.delta = static_cast<double>(both) / trained;
  point.beta = f_sum / r;
  point.beta_prime = g_sum / r;
  return point;
}

MeasureCurve::MeasureCurve(std::vector<MeasurePoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].s > 0.0 && points_[i].s <= 1.0)) throw InvalidSpecError("curve s values must lie in (0, 1]");
    if (i > 0 && !(points_[i].s > points_[i - 1].s)) throw InvalidSpecError("curve s values must strictly increase");
  }
}

std::optional<double> MeasureCurve::value(std::size_t i, Measure measure) const {
  const auto& p = points_.at(i);
  switch (measure) {
    case Measure::LearningProbability:
      return p.delta;
    case Measure::TrainingLikelihood:
      return p.alpha;
    case Measure::GeneralizationLikelihood:
      return p.alpha_prime;
    case Measure::TrainingScore:
      return p.beta;
    case Measure::GeneralizationScore:
      return p.beta_prime;
  }
  return std::nullopt;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidSpecError("trapezoid: x and y differ in length");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] < x[i - 1]) throw InvalidSpecError("trapezoid: x must be non-decreasing");
    area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return area;
}

CumulativeResult cumulative(const MeasureCurve& curve, Measure measure) {
  const auto points = curve.points();
  std::vector<double> xs, ys;
  CumulativeResult result;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (const auto v = curve.value(i, measure)) {
      xs.push_back(points[i].s);
      ys.push_back(*v);
    } else {
      ++result.dropped;
    }
  }
  if (xs.size() < 2) throw InvalidSpecError("cumulative measure needs at least two defined points");
  result.area = trapezoid(xs, ys);
  if (result.dropped > 0) {
    const double full = points.back().s - points.front().s;
    const double covered = xs.back() - xs.front();
    result.area *= full / covered;
  }
  return result;
}

std::vector<std::uint64_t> default_sample_sizes(std::uint64_t input_space, std::uint32_t max_points) {
  std::vector<std::uint64_t> sizes;
  if (input_space <= max_points) {
    for (std::uint64_t m = 1; m <= input_space; ++m) sizes.push_back(m);
    return sizes;
  }
  for (std::uint32_t k = 1; k <= max_points; ++k) {
    const auto m = std::max<std::uint64_t>(
        1, (input_space * k + max_points / 2) / max_points);
    if (sizes.empty() || sizes.back() != m) sizes.push_back(m);
  }
  return sizes;
}

std::string curve_row(const MeasurePoint& p) {
  std::string row = format_double(p.s) + ',' + std::to_string(p.runs) + ',' + format_double(p.alpha) + ',' +
                    format_double(p.alpha_prime) + ',';
  if (p.delta) row += format_double(*p.delta);
  row += ',' + format_double(p.beta) + ',' + format_double(p.beta_prime);
  return row;
}

void write_curve_csv(std::ostream& out, const MeasureCurve& curve, bool header) {
  if (header) out << "s,r,alpha,alpha_prime,delta,beta,beta_prime\n";
  for (const auto& p : curve.points()) out << curve_row(p) << '\n';
}

}  // namespace rbn
