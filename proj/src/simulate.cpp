#include "rbn/simulate.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "rbn/error.hpp"
#include "rbn/rng.hpp"

namespace rbn {

std::string BitString::str() const {
  std::string text(width, '0');
  for (std::uint32_t i = 0; i < width; ++i) text[i] = (*this)[i] ? '1' : '0';
  return text;
}

BitString BitString::parse(std::string_view text) {
  if (text.size() > 64) throw ParseError("bit string longer than 64 bits");
  BitString bits{0, static_cast<std::uint32_t>(text.size())};
  for (char c : text) {
    if (c != '0' && c != '1') throw ParseError("invalid bit string '" + std::string(text) + "'");
    bits.value = (bits.value << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return bits;
}

StateVector step(const BooleanNetwork& net, const StateVector& state) {
  if (state.size() != net.total_nodes()) throw InvalidSpecError("state length does not match network");
  StateVector next = state;
  for (NodeId id = net.input_count(); id < net.total_nodes(); ++id) {
    std::size_t index = 0;
    std::uint32_t bit = 0;
    for (NodeId s : net.sources(id)) index |= static_cast<std::size_t>(state[s] & 1U) << bit++;
    next[id] = net.table(id).get(index) ? 1 : 0;
  }
  return next;
}

Attractor find_attractor(const BooleanNetwork& net, StateVector state) {
  std::map<StateVector, std::uint64_t> seen;
  for (std::uint64_t t = 0;; ++t) {
    auto [it, inserted] = seen.emplace(state, t);
    if (!inserted) return Attractor{it->second, t - it->second};
    state = step(net, state);
  }
}

OutputMatrix::OutputMatrix(std::uint32_t lanes, std::uint32_t outputs)
    : lanes_(lanes), outputs_(outputs), stride_((lanes + 63) / 64), words_(std::size_t{stride_} * outputs, 0) {}

BitString OutputMatrix::row(std::uint32_t lane) const {
  BitString bits{0, outputs_};
  for (std::uint32_t k = 0; k < outputs_; ++k) bits.set(k, get(lane, k));
  return bits;
}

Simulator::Simulator(const BooleanNetwork& net)
    : nodes_(net.node_count()), inputs_(net.input_count()), outputs_(net.output_count()) {
  const std::uint32_t total = net.total_nodes();
  // Backward reachability from the outputs.
  std::vector<std::uint8_t> needed(total, 0);
  std::vector<NodeId> stack;
  for (std::uint32_t k = 0; k < outputs_; ++k) {
    needed[net.output_node(k)] = 1;
    stack.push_back(net.output_node(k));
  }
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId s : net.sources(id)) {
      if (!needed[s] && s >= inputs_) stack.push_back(s);
      needed[s] = 1;
    }
  }

  std::vector<std::uint32_t> slot(total, 0);
  for (NodeId id = 0; id < inputs_; ++id) slot[id] = id;
  std::uint32_t next_slot = inputs_;
  for (NodeId id = inputs_; id < total; ++id) {
    if (needed[id]) slot[id] = next_slot++;
  }
  for (NodeId id = inputs_; id < total; ++id) {
    if (!needed[id]) continue;
    const auto srcs = net.sources(id);
    const auto& table = net.table(id);
    active_.push_back(Node{static_cast<std::uint32_t>(sources_.size()), static_cast<std::uint32_t>(srcs.size()),
                           static_cast<std::uint32_t>(tables_.size()), table.is_hashed(), table.key()});
    for (NodeId s : srcs) sources_.push_back(slot[s]);
    tables_.insert(tables_.end(), table.words().begin(), table.words().end());
  }
  for (std::uint32_t k = 0; k < outputs_; ++k) output_slots_.push_back(slot[net.output_node(k)]);
}

namespace {

// Evaluates a lookup table of arity <= 6 over 64 lanes at once with a
// multiplexer tree: each level selects between table halves on one input.
inline std::uint64_t mux_tree(std::uint64_t table, const std::uint64_t* inputs, std::uint32_t arity) {
  std::uint64_t level[32];
  const std::uint64_t x0 = inputs[0];
  const std::uint64_t choices[4] = {0, ~x0, x0, ~std::uint64_t{0}};
  std::uint32_t half = 1U << (arity - 1);
  for (std::uint32_t i = 0; i < half; ++i) level[i] = choices[(table >> (2 * i)) & 3U];
  for (std::uint32_t k = 1; k < arity; ++k) {
    const std::uint64_t x = inputs[k];
    half >>= 1;
    for (std::uint32_t i = 0; i < half; ++i) {
      const std::uint64_t lo = level[2 * i];
      level[i] = lo ^ (x & (lo ^ level[2 * i + 1]));
    }
  }
  return level[0];
}

}  // namespace

void Simulator::advance(const std::uint64_t* current, std::uint64_t* next, std::uint32_t words,
                        std::span<const std::uint64_t> lane_masks, std::uint32_t lanes) const {
  const std::uint32_t lane_width = std::min(lanes, 64U);
  std::uint64_t gathered[kMaxHashedArity];
  for (std::size_t p = 0; p < active_.size(); ++p) {
    const Node& node = active_[p];
    const std::uint32_t* srcs = sources_.data() + node.first_source;
    const std::uint64_t* table = tables_.data() + node.table_offset;
    std::uint64_t* out = next + (inputs_ + p) * words;
    const bool use_mux = !node.hashed && node.arity <= 6 && (1U << node.arity) <= 2 * node.arity * lane_width + 4;
    for (std::uint32_t w = 0; w < words; ++w) {
      for (std::uint32_t k = 0; k < node.arity; ++k) gathered[k] = current[std::size_t{srcs[k]} * words + w];
      std::uint64_t result = 0;
      if (node.arity == 0) {
        result = (table[0] & 1U) ? ~std::uint64_t{0} : 0;
      } else if (use_mux) {
        result = mux_tree(table[0], gathered, node.arity);
      } else {
        const std::uint32_t count = std::min(64U, lanes - w * 64);
        for (std::uint32_t l = 0; l < count; ++l) {
          std::uint64_t index = 0;
          for (std::uint32_t k = 0; k < node.arity; ++k) index |= ((gathered[k] >> l) & 1U) << k;
          const std::uint64_t bit =
              node.hashed ? derive_seed(node.key, index) & 1U : (table[index >> 6] >> (index & 63)) & 1U;
          result |= bit << l;
        }
      }
      out[w] = result & lane_masks[w];
    }
  }
}

OutputMatrix Simulator::run(std::span<const std::uint64_t> patterns, const EvaluationOptions& options) const {
  const auto lanes = static_cast<std::uint32_t>(patterns.size());
  OutputMatrix result(lanes, outputs_);
  if (lanes == 0) return result;

  const std::uint32_t words = (lanes + 63) / 64;
  std::vector<std::uint64_t> masks(words, ~std::uint64_t{0});
  if (lanes % 64 != 0) masks.back() = (std::uint64_t{1} << (lanes % 64)) - 1;

  const std::size_t slots = inputs_ + active_.size();
  std::vector<std::uint64_t> buffer_a(slots * words, 0);
  std::vector<std::uint64_t> buffer_b(slots * words, 0);
  std::vector<std::uint64_t> input_words(std::size_t{inputs_} * words, 0);
  for (std::uint32_t lane = 0; lane < lanes; ++lane) {
    for (std::uint32_t i = 0; i < inputs_; ++i) {
      if ((patterns[lane] >> (inputs_ - 1 - i)) & 1U) input_words[i * words + lane / 64] |= std::uint64_t{1} << (lane % 64);
    }
  }

  const std::uint64_t transient = options.transient_steps ? options.transient_steps : 2ULL * nodes_;
  const std::uint64_t averaging = std::max<std::uint64_t>(1, options.averaging_steps ? options.averaging_steps : nodes_);
  const std::uint64_t horizon = transient + averaging;
  const std::uint32_t trials = options.initial == InitialState::Random ? std::max(1U, options.trials) : 1U;

  std::vector<std::uint64_t> counts(std::size_t{outputs_} * lanes, 0);
  const std::size_t compute_offset = std::size_t{inputs_} * words;
  const std::size_t compute_words = slots * words - compute_offset;

  auto accumulate = [&](const std::uint64_t* state, std::uint64_t weight) {
    for (std::uint32_t k = 0; k < outputs_; ++k) {
      const std::uint64_t* row = state + std::size_t{output_slots_[k]} * words;
      for (std::uint32_t w = 0; w < words; ++w) {
        for (std::uint64_t bits = row[w]; bits != 0; bits &= bits - 1) {
          counts[std::size_t{k} * lanes + w * 64 + static_cast<std::uint32_t>(std::countr_zero(bits))] += weight;
        }
      }
    }
  };

  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    std::fill(buffer_a.begin(), buffer_a.end(), 0);
    std::copy(input_words.begin(), input_words.end(), buffer_a.begin());
    std::copy(input_words.begin(), input_words.end(), buffer_b.begin());
    if (options.initial == InitialState::Random) {
      Rng rng(derive_seed(options.seed, trial));
      for (std::size_t i = 0; i < compute_words; ++i) buffer_a[compute_offset + i] = rng.next() & masks[i % words];
    }
    std::uint64_t* current = buffer_a.data();
    std::uint64_t* next = buffer_b.data();
    for (std::uint64_t t = 0; t < horizon; ++t) {
      advance(current, next, words, masks, lanes);
      const bool fixed =
          std::memcmp(current + compute_offset, next + compute_offset, compute_words * sizeof(std::uint64_t)) == 0;
      std::swap(current, next);
      if (t >= transient) accumulate(current, 1);
      if (fixed) {
        // The state no longer changes; credit the remaining averaging steps.
        const std::uint64_t done = t + 1;
        const std::uint64_t remaining = horizon - std::max(done, transient);
        if (done < horizon && remaining > 0) accumulate(current, remaining);
        break;
      }
    }
  }

  const std::uint64_t total = averaging * trials;
  for (std::uint32_t k = 0; k < outputs_; ++k) {
    for (std::uint32_t lane = 0; lane < lanes; ++lane) {
      if (2 * counts[std::size_t{k} * lanes + lane] >= total) result.set(lane, k);
    }
  }
  return result;
}

OutputMatrix Simulator::run_all_inputs(const EvaluationOptions& options) const {
  if (inputs_ > 30) throw InputSpaceTooLargeError("2^" + std::to_string(inputs_) + " input patterns");
  std::vector<std::uint64_t> patterns(std::size_t{1} << inputs_);
  for (std::size_t j = 0; j < patterns.size(); ++j) patterns[j] = j;
  return run(patterns, options);
}

BitString evaluate(const BooleanNetwork& net, BitString input, const EvaluationOptions& options) {
  if (input.width != net.input_count()) throw InvalidSpecError("input width does not match network inputs");
  const std::uint64_t pattern = input.value;
  return Simulator(net).run(std::span(&pattern, 1), options).row(0);
}

FunctionFingerprint::FunctionFingerprint(std::uint32_t inputs, std::uint32_t outputs)
    : inputs_(inputs), outputs_(outputs), words_((bit_count() + 63) / 64, 0) {}

bool FunctionFingerprint::output(std::uint64_t pattern, std::uint32_t k) const noexcept {
  const auto p = position(pattern, k);
  return (words_[p >> 6] >> (p & 63)) & 1U;
}

void FunctionFingerprint::set_output(std::uint64_t pattern, std::uint32_t k, bool bit) noexcept {
  const auto p = position(pattern, k);
  const std::uint64_t mask = std::uint64_t{1} << (p & 63);
  words_[p >> 6] = bit ? (words_[p >> 6] | mask) : (words_[p >> 6] & ~mask);
}

FunctionFingerprint FunctionFingerprint::from_outputs(const OutputMatrix& outputs, std::uint32_t inputs) {
  FunctionFingerprint fp(inputs, outputs.outputs());
  if (outputs.lanes() != (std::uint64_t{1} << inputs)) throw Error("fingerprint requires all 2^I patterns");
  for (std::uint32_t lane = 0; lane < outputs.lanes(); ++lane) {
    for (std::uint32_t k = 0; k < outputs.outputs(); ++k) {
      if (outputs.get(lane, k)) fp.set_output(lane, k, true);
    }
  }
  return fp;
}

std::uint64_t FunctionFingerprint::key() const {
  if (bit_count() > 64) throw Error("fingerprint wider than 64 bits has no integer key");
  return words_[0];
}

std::string FunctionFingerprint::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t digits = (bit_count() + 3) / 4;
  std::string text(digits, '0');
  for (std::uint64_t d = 0; d < digits; ++d) {
    const std::uint64_t p = d * 4;
    const std::uint64_t nibble = (words_[p >> 6] >> (p & 63)) & 0xF;
    text[digits - 1 - d] = kDigits[nibble];
  }
  return text;
}

FunctionFingerprint realized_function(const BooleanNetwork& net, const EvaluationOptions& options,
                                      std::uint64_t cap) {
  const std::uint32_t inputs = net.input_count();
  if (inputs >= 40 || (std::uint64_t{1} << inputs) * net.output_count() > cap) {
    throw InputSpaceTooLargeError("2^" + std::to_string(inputs) + " x " + std::to_string(net.output_count()) +
                                  " truth table exceeds enumeration cap " + std::to_string(cap));
  }
  return FunctionFingerprint::from_outputs(Simulator(net).run_all_inputs(options), inputs);
}

}  // namespace rbn
