#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rbn/bits.hpp"
#include "rbn/network.hpp"
#include "rbn/rng.hpp"
#include "rbn/simulate.hpp"

namespace rbn {

enum class TaskKind { EvenOdd, BitwiseAnd, Mapping };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(const std::string& text);

/// How mapping-task outputs are scored. Permutation compares against the
/// permuted input bit by bit; Popcount only requires the same number of 1s
/// and scores |popcount(out) - popcount(in)|, the Hamming distance to the
/// nearest admissible output.
enum class MappingScorer { Permutation, Popcount };

// Target functions. Bit strings use position 0 for the first node.

bool target_even_odd(BitString input);
/// Network-facing input is a‖b.
BitString target_bitwise_and(BitString a, BitString b);
/// Output bit j is input bit perm[j].
BitString target_mapping(BitString input, std::span<const std::uint32_t> perm);

/// Number of differing positions; throws Error on width mismatch.
std::uint32_t hamming_distance(BitString x, BitString y);

/// A target mapping from I input bits to O output bits.
class TaskSpec {
 public:
  static TaskSpec even_odd(std::uint32_t inputs);
  /// `inputs` is the total width 2l and must be even.
  static TaskSpec bitwise_and(std::uint32_t inputs);
  static TaskSpec mapping(std::vector<std::uint32_t> perm, MappingScorer scorer = MappingScorer::Permutation);
  /// Mapping task with a uniformly random permutation of `inputs` positions.
  static TaskSpec random_mapping(std::uint32_t inputs, Rng& rng, MappingScorer scorer = MappingScorer::Permutation);

  TaskKind kind() const noexcept { return kind_; }
  std::uint32_t inputs() const noexcept { return inputs_; }
  std::uint32_t outputs() const noexcept { return outputs_; }
  std::uint64_t input_space() const noexcept { return std::uint64_t{1} << inputs_; }
  std::span<const std::uint32_t> permutation() const noexcept { return perm_; }
  MappingScorer scorer() const noexcept { return scorer_; }

  BitString target(BitString input) const;
  BitString target(std::uint64_t pattern) const { return target(BitString{pattern, inputs_}); }

  /// Per-pattern error d(j) / O in [0, 1].
  double normalized_error(BitString input, BitString output) const;

 private:
  TaskSpec(TaskKind kind, std::uint32_t inputs, std::uint32_t outputs) : kind_(kind), inputs_(inputs), outputs_(outputs) {}

  TaskKind kind_;
  std::uint32_t inputs_;
  std::uint32_t outputs_;
  std::vector<std::uint32_t> perm_;
  MappingScorer scorer_ = MappingScorer::Permutation;
};

struct Pattern {
  BitString input;
  BitString target;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Training sample: m distinct inputs of the task's input space.
class PatternSet {
 public:
  PatternSet() = default;
  explicit PatternSet(std::vector<Pattern> patterns);

  std::span<const Pattern> patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }
  bool empty() const noexcept { return patterns_.empty(); }
  /// Input values, in set order.
  std::vector<std::uint64_t> inputs() const;

  friend bool operator==(const PatternSet&, const PatternSet&) = default;

 private:
  std::vector<Pattern> patterns_;
};

/// Every input of the task, ascending.
PatternSet full_input_space(const TaskSpec& task);

/// m distinct inputs drawn uniformly without replacement, sorted ascending.
/// Throws InvalidSpecError when m is 0 or exceeds 2^I.
PatternSet draw_sample(const TaskSpec& task, std::uint64_t sample_size, Rng& rng);

/// f = 1 - mean(d(j)/O) over the sample. Throws on an empty sample or a
/// dimension mismatch.
double fitness(const BooleanNetwork& net, const TaskSpec& task, const PatternSet& sample,
               const EvaluationOptions& options = {});
/// Same functional over the full input space.
double generalization(const BooleanNetwork& net, const TaskSpec& task, const EvaluationOptions& options = {},
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Scores precomputed outputs (lane j = sample pattern j).
double score_outputs(const TaskSpec& task, const PatternSet& sample, const OutputMatrix& outputs);

/// CSV with header input_bits,target_bits; bits printed first node first.
void write_patterns_csv(std::ostream& out, const PatternSet& set);
PatternSet read_patterns_csv(std::istream& in);

}  // namespace rbn
