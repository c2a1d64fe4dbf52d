#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rbn/network.hpp"
#include "rbn/rng.hpp"

namespace rbn {

/// Linear encoding of a network: link endpoints [src1, dst1, src2, dst2, ...]
/// followed by every non-input node's lookup table, node-major. A node's
/// table starts at the sum of 2^K over the nodes before it, so node index and
/// in-degrees locate every table.
///
/// The feedforward ranking rides along with the genome but is never varied.
struct Genome {
  std::vector<NodeId> links;
  std::vector<std::uint8_t> table_bits;
  std::vector<std::uint32_t> order;

  /// Number of variable locations (link endpoints plus table bits).
  std::size_t size() const noexcept { return links.size() + table_bits.size(); }

  friend bool operator==(const Genome&, const Genome&) = default;
};

Genome encode(const BooleanNetwork& net);

/// Rebuilds the network described by `genome` using the shape (N, I, O) of
/// `spec`. Throws DecodeError when the table section does not match the
/// in-degrees implied by the link section, or an endpoint is illegal.
BooleanNetwork decode(const Genome& genome, const NetworkSpec& spec);

/// Start offset of each non-input node's table in `table_bits`, plus a final
/// entry holding the total length.
std::vector<std::size_t> table_offsets(std::span<const NodeId> links, const NetworkSpec& spec);

/// Grows a table by cyclic copy or shrinks it by dropping the highest
/// entries.
std::vector<std::uint8_t> resize_table(std::span<const std::uint8_t> bits, std::size_t length);

/// Applies Poisson(rate) point mutations. A link endpoint is replaced by a
/// uniformly chosen legal node id; a table bit is flipped. Tables follow
/// in-degree changes through resize_table.
Genome mutate(Genome genome, const NetworkSpec& spec, double rate, Rng& rng);

/// One point mutation at `location`, exposed for tests.
void mutate_at(Genome& genome, const NetworkSpec& spec, std::size_t location, Rng& rng);

/// One-point crossover at a cut drawn uniformly from [0, min(|a|, |b|)],
/// followed by table repair and feedforward enforcement.
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, const NetworkSpec& spec, Rng& rng);

/// Crossover at an explicit cut. The first child takes a's genes before the
/// cut and b's after it. Each child's node tables are assembled from the
/// parts of the parents' tables on the matching side of the cut and resized
/// to the child's in-degrees. No feedforward enforcement is applied.
std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, const NetworkSpec& spec, std::size_t cut);

/// Redirects every link whose source does not rank below its destination to
/// a uniformly chosen legal source. No-op for recurrent genomes.
void enforce_feedforward(Genome& genome, const NetworkSpec& spec, Rng& rng);
BooleanNetwork enforce_feedforward(const BooleanNetwork& net, Rng& rng);

}  // namespace rbn
