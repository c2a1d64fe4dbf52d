#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbn/bits.hpp"
#include "rbn/network.hpp"

namespace rbn {

/// One bit per node, indexed by node id (inputs first).
using StateVector = std::vector<std::uint8_t>;

/// Synchronous update: every non-input node reads the previous state.
/// Input bits are copied through unchanged.
StateVector step(const BooleanNetwork& net, const StateVector& state);

struct Attractor {
  std::uint64_t transient = 0;  // steps before the cycle is entered
  std::uint64_t period = 0;
};

/// Iterates `step` from `state` until a state repeats.
Attractor find_attractor(const BooleanNetwork& net, StateVector state);

enum class InitialState { Zero, Random };

/// Controls how outputs are read from the dynamics. Defaults: start every
/// compute node at 0, run 2N transient steps, then average the outputs over
/// N further steps; an output is 1 iff it was 1 for at least half of them.
struct EvaluationOptions {
  InitialState initial = InitialState::Zero;
  std::uint32_t trials = 1;            // Random initial states: trials averaged together
  std::uint64_t seed = 0;              // Random initial states: stream seed
  std::uint32_t transient_steps = 0;   // 0 means 2N
  std::uint32_t averaging_steps = 0;   // 0 means N
};

/// Output bits of a batch of input patterns, one "lane" per pattern.
class OutputMatrix {
 public:
  OutputMatrix(std::uint32_t lanes, std::uint32_t outputs);

  std::uint32_t lanes() const noexcept { return lanes_; }
  std::uint32_t outputs() const noexcept { return outputs_; }
  bool get(std::uint32_t lane, std::uint32_t output) const noexcept {
    return (words_[output * stride_ + (lane >> 6)] >> (lane & 63)) & 1U;
  }
  void set(std::uint32_t lane, std::uint32_t output) noexcept {
    words_[output * stride_ + (lane >> 6)] |= std::uint64_t{1} << (lane & 63);
  }
  /// Output bits of one lane as a bit string (position 0 = first output).
  BitString row(std::uint32_t lane) const;

 private:
  std::uint32_t lanes_;
  std::uint32_t outputs_;
  std::uint32_t stride_;
  std::vector<std::uint64_t> words_;
};

/// Network compiled for bit-parallel evaluation: each 64-bit word carries one
/// input pattern per bit. Only nodes from which an output is reachable are
/// simulated, and a run stops early once the global state is a fixed point.
class Simulator {
 public:
  explicit Simulator(const BooleanNetwork& net);

  /// Evaluates every pattern (input node 1 = most significant bit).
  OutputMatrix run(std::span<const std::uint64_t> patterns, const EvaluationOptions& options = {}) const;
  /// Evaluates all 2^I patterns in ascending order.
  OutputMatrix run_all_inputs(const EvaluationOptions& options = {}) const;

  std::uint32_t inputs() const noexcept { return inputs_; }
  std::uint32_t outputs() const noexcept { return outputs_; }
  std::uint32_t active_nodes() const noexcept { return static_cast<std::uint32_t>(active_.size()); }

 private:
  struct Node {
    std::uint32_t first_source;  // into sources_
    std::uint32_t arity;
    std::uint32_t table_offset;  // into tables_
    bool hashed = false;         // table entries come from derive_seed(key, index)
    std::uint64_t key = 0;
  };

  void advance(const std::uint64_t* current, std::uint64_t* next, std::uint32_t words,
               std::span<const std::uint64_t> lane_masks, std::uint32_t lanes) const;

  std::uint32_t nodes_;
  std::uint32_t inputs_;
  std::uint32_t outputs_;
  std::vector<Node> active_;                 // compact slot = inputs_ + position
  std::vector<std::uint32_t> sources_;       // compact slots
  std::vector<std::uint64_t> tables_;        // concatenated table words
  std::vector<std::uint32_t> output_slots_;  // compact slot of each output node
};

/// Single-pattern evaluation.
BitString evaluate(const BooleanNetwork& net, BitString input, const EvaluationOptions& options = {});

/// Default cap on 2^I * O for exhaustive enumeration.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Truth table of the function a network realizes: the output column for
/// inputs 0..2^I-1 read as one binary number with input 0's outputs most
/// significant (for I=3, O=1 a value in [0, 255]).
class FunctionFingerprint {
 public:
  FunctionFingerprint(std::uint32_t inputs, std::uint32_t outputs);

  static FunctionFingerprint from_outputs(const OutputMatrix& outputs, std::uint32_t inputs);

  std::uint32_t inputs() const noexcept { return inputs_; }
  std::uint32_t outputs() const noexcept { return outputs_; }
  std::uint64_t bit_count() const noexcept { return (std::uint64_t{1} << inputs_) * outputs_; }

  /// Output bit for input pattern `pattern`, output `k`.
  bool output(std::uint64_t pattern, std::uint32_t k) const noexcept;
  void set_output(std::uint64_t pattern, std::uint32_t k, bool bit) noexcept;

  /// Integer key; throws Error when the table has more than 64 bits.
  std::uint64_t key() const;
  std::string hex() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const FunctionFingerprint&, const FunctionFingerprint&) = default;
  friend std::strong_ordering operator<=>(const FunctionFingerprint&, const FunctionFingerprint&) = default;

 private:
  std::uint64_t position(std::uint64_t pattern, std::uint32_t k) const noexcept {
    return ((std::uint64_t{1} << inputs_) - 1 - pattern) * outputs_ + (outputs_ - 1 - k);
  }

  std::uint32_t inputs_;
  std::uint32_t outputs_;
  std::vector<std::uint64_t> words_;
};

FunctionFingerprint realized_function(const BooleanNetwork& net, const EvaluationOptions& options = {},
                                      std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace rbn
