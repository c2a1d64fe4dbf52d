#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbn/rng.hpp"

namespace rbn {

using NodeId = std::uint32_t;

enum class NodeRole { Input, Compute, Output };

/// How build_random_network places links.
///  - ExactL: exactly round(N*K) links, endpoints drawn uniformly with replacement.
///  - BinomialTrial: round(N*K) candidate links, each kept with probability 1/2.
enum class WiringMode { ExactL, BinomialTrial };

std::string to_string(WiringMode mode);
WiringMode parse_wiring_mode(const std::string& text);

/// Largest in-degree for which a lookup table is materialized (2^26 bits).
inline constexpr std::uint32_t kMaxArity = 26;

/// Largest in-degree of a random table. Above kMaxArity a random table is
/// hashed: entry i is derive_seed(key, i) & 1, computed only when visited.
/// Hashed tables are read-only and cannot be encoded into a genome.
inline constexpr std::uint32_t kMaxHashedArity = 62;

/// Bit table of length 2^arity, packed LSB-first into 64-bit words.
class LookupTable {
 public:
  LookupTable() : LookupTable(0) {}
  explicit LookupTable(std::uint32_t arity);
  static LookupTable hashed(std::uint32_t arity, std::uint64_t key);

  static LookupTable random(std::uint32_t arity, Rng& rng);
  static LookupTable from_bits(std::span<const std::uint8_t> bits);

  std::uint32_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return std::size_t{1} << arity_; }

  bool is_hashed() const noexcept { return hashed_; }
  std::uint64_t key() const noexcept { return key_; }

  bool get(std::size_t index) const noexcept {
    if (hashed_) return derive_seed(key_, index) & 1U;
    return (words_[index >> 6] >> (index & 63)) & 1U;
  }
  // set and flip apply to materialized tables only.
  void set(std::size_t index, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (index & 63);
    if (value) {
      words_[index >> 6] |= mask;
    } else {
      words_[index >> 6] &= ~mask;
    }
  }
  void flip(std::size_t index) noexcept { words_[index >> 6] ^= std::uint64_t{1} << (index & 63); }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const LookupTable&, const LookupTable&) = default;

 private:
  std::uint32_t arity_;
  bool hashed_ = false;
  std::uint64_t key_ = 0;
  std::vector<std::uint64_t> words_;  // empty for hashed tables
};

struct Link {
  NodeId source;
  NodeId destination;
  friend bool operator==(const Link&, const Link&) = default;
};

/// Parameters of the G(N, K) ensemble with I inputs and O outputs.
struct NetworkSpec {
  std::uint32_t nodes = 1;     // N, non-input nodes
  double connectivity = 2.0;   // K, average in-degree target
  std::uint32_t inputs = 1;    // I
  std::uint32_t outputs = 1;   // O, taken from the last O non-input nodes
  WiringMode wiring = WiringMode::ExactL;
  bool feedforward = false;

  /// Number of link draws, round(N*K).
  std::uint32_t link_draws() const;
  /// Throws InvalidSpecError naming the offending field.
  void validate() const;
};

/// Directed multigraph of links with a lookup table per non-input node.
///
/// Node ids: [0, I) are inputs, [I, I+N) are non-input nodes, and the last O
/// of those are outputs. A node's lookup table is indexed by its incoming
/// links in link-list order with the earliest link as the least significant
/// bit. Immutable after construction.
class BooleanNetwork {
 public:
  /// Validates every structural invariant; throws InvalidSpecError.
  /// `order` is empty for recurrent networks, otherwise one rank per node.
  BooleanNetwork(std::uint32_t nodes, std::uint32_t inputs, std::uint32_t outputs,
                 std::vector<Link> links, std::vector<LookupTable> tables,
                 std::vector<std::uint32_t> order = {});

  std::uint32_t node_count() const noexcept { return nodes_; }
  std::uint32_t input_count() const noexcept { return inputs_; }
  std::uint32_t output_count() const noexcept { return outputs_; }
  std::uint32_t total_nodes() const noexcept { return nodes_ + inputs_; }

  NodeRole role(NodeId id) const noexcept;
  NodeId output_node(std::uint32_t k) const noexcept { return inputs_ + nodes_ - outputs_ + k; }

  std::span<const Link> links() const noexcept { return links_; }
  /// Table of non-input node `id`.
  const LookupTable& table(NodeId id) const { return tables_.at(id - inputs_); }
  std::span<const LookupTable> tables() const noexcept { return tables_; }
  /// Sources feeding node `id`, in link-list order (LSB first).
  std::span<const NodeId> sources(NodeId id) const;
  std::uint32_t in_degree(NodeId id) const { return static_cast<std::uint32_t>(sources(id).size()); }

  bool feedforward() const noexcept { return !order_.empty(); }
  std::span<const std::uint32_t> order() const noexcept { return order_; }

  friend bool operator==(const BooleanNetwork& a, const BooleanNetwork& b) {
    return a.nodes_ == b.nodes_ && a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ &&
           a.links_ == b.links_ && a.tables_ == b.tables_ && a.order_ == b.order_;
  }

 private:
  std::uint32_t nodes_;
  std::uint32_t inputs_;
  std::uint32_t outputs_;
  std::vector<Link> links_;
  std::vector<LookupTable> tables_;
  std::vector<std::uint32_t> order_;
  // CSR adjacency of incoming sources, indexed by node id.
  std::vector<std::uint32_t> source_offsets_;
  std::vector<NodeId> source_ids_;
};

/// Computes per-node in-degrees (indexed by node id) from a link list.
std::vector<std::uint32_t> in_degrees(std::span<const Link> links, std::uint32_t total_nodes);

/// Random feedforward ranking: inputs take ranks [0, I), non-input nodes a
/// uniform permutation of [I, I+N).
std::vector<std::uint32_t> random_order(std::uint32_t nodes, std::uint32_t inputs, Rng& rng);

BooleanNetwork build_random_network(const NetworkSpec& spec, Rng& rng);

}  // namespace rbn
