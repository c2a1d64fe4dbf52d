#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rbn/network.hpp"
#include "rbn/rng.hpp"
#include "rbn/simulate.hpp"

namespace rbn {

/// Occurrence counts of realized functions over an ensemble sample.
class FunctionHistogram {
 public:
  void add(const FunctionFingerprint& fingerprint, std::uint64_t count = 1);
  void merge(const FunctionHistogram& other);

  std::uint64_t samples() const noexcept { return samples_; }
  std::size_t distinct() const noexcept { return counts_.size(); }
  const std::map<FunctionFingerprint, std::uint64_t>& counts() const noexcept { return counts_; }
  std::vector<std::uint64_t> count_values() const;

 private:
  std::map<FunctionFingerprint, std::uint64_t> counts_;
  std::uint64_t samples_ = 0;
};

/// Plug-in Shannon entropy in bits, -sum p log2 p, without bias correction.
double entropy(const FunctionHistogram& histogram);
double entropy_from_counts(std::span<const std::uint64_t> counts);

/// Standard error of the plug-in entropy from multinomial bootstrap
/// resamples of the histogram.
double entropy_standard_error(const FunctionHistogram& histogram, std::uint32_t replicates, Rng& rng);

/// Builds `samples` networks from `spec` and counts the functions they
/// realize. Network i is drawn from substream derive_seed(seed, i), so the
/// result does not depend on `workers`.
FunctionHistogram sample_ensemble(const NetworkSpec& spec, std::uint64_t samples, std::uint64_t seed,
                                  unsigned workers = 1, const EvaluationOptions& options = {});

/// Seed of the ensemble cell at connectivity K under a master seed.
std::uint64_t connectivity_seed(std::uint64_t seed, double connectivity);

/// K values lo, lo+step, ..., hi computed on an integer lattice.
std::vector<double> connectivity_grid(double lo, double hi, double step);

struct EntropyPoint {
  double connectivity = 0.0;
  double entropy = 0.0;
};

struct EntropyPeak {
  double connectivity = 0.0;  // K*
  double entropy = 0.0;       // S*
  std::vector<EntropyPoint> scanned;  // every evaluated K, ascending
};

/// Entropy at every K of `grid` (ties resolved toward lower K). With a
/// positive `refine_step`, K values at that step within one coarse step of
/// the coarse maximum are scanned as well.
EntropyPeak max_entropy_connectivity(const NetworkSpec& base, std::span<const double> grid, std::uint64_t samples,
                                     std::uint64_t seed, double refine_step = 0.0, unsigned workers = 1);

}  // namespace rbn
