#include "rbn/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "rbn/error.hpp"
#include "rbn/parallel.hpp"

namespace rbn {

void FunctionHistogram::add(const FunctionFingerprint& fingerprint, std::uint64_t count) {
  counts_[fingerprint] += count;
  samples_ += count;
}

void FunctionHistogram::merge(const FunctionHistogram& other) {
  for (const auto& [fp, count] : other.counts_) add(fp, count);
}

std::vector<std::uint64_t> FunctionHistogram::count_values() const {
  std::vector<std::uint64_t> values;
  values.reserve(counts_.size());
  for (const auto& [fp, count] : counts_) values.push_back(count);
  return values;
}

double entropy_from_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw InvalidSpecError("entropy of an empty histogram");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double entropy(const FunctionHistogram& histogram) { return entropy_from_counts(histogram.count_values()); }

double entropy_standard_error(const FunctionHistogram& histogram, std::uint32_t replicates, Rng& rng) {
  const auto counts = histogram.count_values();
  const std::uint64_t total = histogram.samples();
  if (total == 0 || replicates < 2) throw InvalidSpecError("bootstrap needs samples and at least two replicates");
  std::vector<std::uint64_t> cumulative(counts.size());
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) cumulative[i] = running += counts[i];

  std::vector<double> estimates;
  estimates.reserve(replicates);
  std::vector<std::uint64_t> resample(counts.size());
  for (std::uint32_t r = 0; r < replicates; ++r) {
    std::fill(resample.begin(), resample.end(), 0);
    for (std::uint64_t n = 0; n < total; ++n) {
      const std::uint64_t u = rng.uniform(total);
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      ++resample[static_cast<std::size_t>(it - cumulative.begin())];
    }
    estimates.push_back(entropy_from_counts(resample));
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= replicates;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  return std::sqrt(var / (replicates - 1));
}

FunctionHistogram sample_ensemble(const NetworkSpec& spec, std::uint64_t samples, std::uint64_t seed,
                                  unsigned workers, const EvaluationOptions& options) {
  spec.validate();
  if (samples == 0) throw InvalidSpecError("ensemble needs at least one sample");
  if (spec.inputs >= 40 || (std::uint64_t{1} << spec.inputs) * spec.outputs > kDefaultEnumerationCap) {
    throw InputSpaceTooLargeError("ensemble truth tables exceed the enumeration cap");
  }
  constexpr std::uint64_t kBlock = 256;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<FunctionHistogram> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t end = std::min(samples, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      Rng rng(derive_seed(seed, i));
      partial[b].add(realized_function(build_random_network(spec, rng), options));
    }
  });
  FunctionHistogram histogram;
  for (const auto& h : partial) histogram.merge(h);
  return histogram;
}

std::uint64_t connectivity_seed(std::uint64_t seed, double connectivity) {
  return derive_seed(seed, static_cast<std::uint64_t>(std::llround(connectivity * 1000.0)));
}

std::vector<double> connectivity_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw InvalidSpecError("connectivity grid needs step > 0 and hi >= lo");
  std::vector<double> grid;
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::int64_t i = 0; i <= count; ++i) {
    grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e6) / 1e6);
  }
  return grid;
}

EntropyPeak max_entropy_connectivity(const NetworkSpec& base, std::span<const double> grid, std::uint64_t samples,
                                     std::uint64_t seed, double refine_step, unsigned workers) {
  if (grid.empty()) throw InvalidSpecError("connectivity grid is empty");
  std::map<std::int64_t, double> scanned;  // keyed by K in thousandths
  auto scan = [&](double k) {
    const auto key = std::llround(k * 1000.0);
    if (k < 0.0 || scanned.contains(key)) return;
    NetworkSpec spec = base;
    spec.connectivity = static_cast<double>(key) / 1000.0;
    scanned[key] = entropy(sample_ensemble(spec, samples, connectivity_seed(seed, spec.connectivity), workers));
  };
  auto best_key = [&] {
    auto best = scanned.begin();
    for (auto it = scanned.begin(); it != scanned.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return best->first;
  };

  for (double k : grid) scan(k);
  if (refine_step > 0.0) {
    std::vector<double> sorted(grid.begin(), grid.end());
    std::sort(sorted.begin(), sorted.end());
    const double peak = static_cast<double>(best_key()) / 1000.0;
    double coarse = sorted.size() > 1 ? sorted[1] - sorted[0] : refine_step;
    for (std::size_t i = 2; i < sorted.size(); ++i) coarse = std::min(coarse, sorted[i] - sorted[i - 1]);
    for (double k : connectivity_grid(std::max(0.0, peak - coarse), peak + coarse, refine_step)) scan(k);
  }

  EntropyPeak result;
  const auto key = best_key();
  result.connectivity = static_cast<double>(key) / 1000.0;
  result.entropy = scanned.at(key);
  for (const auto& [k, h] : scanned) result.scanned.push_back(EntropyPoint{static_cast<double>(k) / 1000.0, h});
  return result;
}

}  // namespace rbn
