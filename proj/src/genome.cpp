#include "rbn/genome.hpp"

#include <algorithm>

#include "rbn/error.hpp"

namespace rbn {

namespace {

std::vector<std::uint32_t> degrees_of(std::span<const NodeId> links, const NetworkSpec& spec) {
  const std::uint32_t total = spec.nodes + spec.inputs;
  std::vector<std::uint32_t> degree(total, 0);
  for (std::size_t i = 1; i < links.size(); i += 2) {
    if (links[i] >= total) throw DecodeError("link destination out of range");
    ++degree[links[i]];
  }
  return degree;
}

// Inverse of a feedforward ranking.
std::vector<NodeId> nodes_by_rank(std::span<const std::uint32_t> order) {
  std::vector<NodeId> by_rank(order.size());
  for (NodeId id = 0; id < order.size(); ++id) by_rank[order[id]] = id;
  return by_rank;
}

std::vector<std::uint8_t> assemble_tables(const std::vector<std::vector<std::uint8_t>>& existing,
                                          std::span<const std::uint32_t> degree, const NetworkSpec& spec) {
  std::vector<std::uint8_t> bits;
  for (std::uint32_t i = 0; i < spec.nodes; ++i) {
    const auto resized = resize_table(existing[i], std::size_t{1} << degree[spec.inputs + i]);
    bits.insert(bits.end(), resized.begin(), resized.end());
  }
  return bits;
}

}  // namespace

Genome encode(const BooleanNetwork& net) {
  Genome genome;
  genome.links.reserve(net.links().size() * 2);
  for (const auto& l : net.links()) {
    genome.links.push_back(l.source);
    genome.links.push_back(l.destination);
  }
  for (const auto& table : net.tables()) {
    if (table.is_hashed()) throw DecodeError("in-degree above the lookup table limit cannot be encoded");
    for (std::size_t i = 0; i < table.size(); ++i) genome.table_bits.push_back(table.get(i) ? 1 : 0);
  }
  genome.order.assign(net.order().begin(), net.order().end());
  return genome;
}

std::vector<std::size_t> table_offsets(std::span<const NodeId> links, const NetworkSpec& spec) {
  const auto degree = degrees_of(links, spec);
  std::vector<std::size_t> offsets(spec.nodes + 1, 0);
  for (std::uint32_t i = 0; i < spec.nodes; ++i) {
    const auto k = degree[spec.inputs + i];
    if (k > kMaxArity) throw DecodeError("in-degree exceeds lookup table limit");
    offsets[i + 1] = offsets[i] + (std::size_t{1} << k);
  }
  return offsets;
}

BooleanNetwork decode(const Genome& genome, const NetworkSpec& spec) {
  if (genome.links.size() % 2 != 0) throw DecodeError("link section has odd length");
  const auto offsets = table_offsets(genome.links, spec);
  if (offsets.back() != genome.table_bits.size()) {
    throw DecodeError("table section has " + std::to_string(genome.table_bits.size()) + " bits, in-degrees require " +
                      std::to_string(offsets.back()));
  }
  std::vector<Link> links;
  links.reserve(genome.links.size() / 2);
  for (std::size_t i = 0; i < genome.links.size(); i += 2) links.push_back(Link{genome.links[i], genome.links[i + 1]});
  std::vector<LookupTable> tables;
  tables.reserve(spec.nodes);
  for (std::uint32_t i = 0; i < spec.nodes; ++i) {
    tables.push_back(LookupTable::from_bits(
        std::span(genome.table_bits).subspan(offsets[i], offsets[i + 1] - offsets[i])));
  }
  try {
    return BooleanNetwork(spec.nodes, spec.inputs, spec.outputs, std::move(links), std::move(tables), genome.order);
  } catch (const InvalidSpecError& e) {
    throw DecodeError(e.what());
  }
}

std::vector<std::uint8_t> resize_table(std::span<const std::uint8_t> bits, std::size_t length) {
  if (bits.empty()) throw DecodeError("cannot resize an empty table");
  std::vector<std::uint8_t> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = bits[i % bits.size()];
  return out;
}

void mutate_at(Genome& genome, const NetworkSpec& spec, std::size_t location, Rng& rng) {
  const std::uint32_t total = spec.nodes + spec.inputs;
  if (location >= genome.links.size()) {
    genome.table_bits.at(location - genome.links.size()) ^= 1U;
    return;
  }
  const std::size_t pair = location & ~std::size_t{1};
  const bool is_destination = (location & 1U) != 0;
  const NodeId source = genome.links[pair];
  const NodeId destination = genome.links[pair + 1];

  if (!is_destination) {
    if (genome.order.empty()) {
      genome.links[pair] = static_cast<NodeId>(rng.uniform(total));
    } else {
      const auto by_rank = nodes_by_rank(genome.order);
      genome.links[pair] = by_rank[rng.uniform(genome.order[destination])];
    }
    return;
  }

  NodeId replacement = 0;
  if (genome.order.empty()) {
    replacement = spec.inputs + static_cast<NodeId>(rng.uniform(spec.nodes));
  } else {
    const std::uint32_t lowest = std::max(genome.order[source] + 1, spec.inputs);
    if (lowest >= total) return;  // source already ranks highest
    const auto by_rank = nodes_by_rank(genome.order);
    replacement = by_rank[lowest + rng.uniform(total - lowest)];
  }
  if (replacement == destination) return;

  const auto old_offsets = table_offsets(genome.links, spec);
  std::vector<std::vector<std::uint8_t>> existing(spec.nodes);
  for (std::uint32_t i = 0; i < spec.nodes; ++i) {
    existing[i].assign(genome.table_bits.begin() + static_cast<std::ptrdiff_t>(old_offsets[i]),
                       genome.table_bits.begin() + static_cast<std::ptrdiff_t>(old_offsets[i + 1]));
  }
  genome.links[pair + 1] = replacement;
  const auto degree = degrees_of(genome.links, spec);
  if (degree[replacement] > kMaxArity) {
    genome.links[pair + 1] = destination;
    return;
  }
  genome.table_bits = assemble_tables(existing, degree, spec);
}

Genome mutate(Genome genome, const NetworkSpec& spec, double rate, Rng& rng) {
  const std::uint32_t count = rng.poisson(rate);
  for (std::uint32_t m = 0; m < count; ++m) {
    const std::size_t location = rng.uniform(genome.size());
    mutate_at(genome, spec, location, rng);
  }
  return genome;
}

namespace {

Genome cross_child(const Genome& first, const Genome& second, const NetworkSpec& spec, std::size_t cut) {
  const std::size_t shared_links = std::min(first.links.size(), second.links.size());
  Genome child;
  std::size_t table_cut = 0;
  if (cut <= shared_links) {
    child.links.assign(first.links.begin(), first.links.begin() + static_cast<std::ptrdiff_t>(cut));
    child.links.insert(child.links.end(), second.links.begin() + static_cast<std::ptrdiff_t>(cut), second.links.end());
  } else {
    child.links = first.links;
    table_cut = cut - shared_links;
  }
  child.order = cut > 0 ? first.order : second.order;

  const auto first_offsets = table_offsets(first.links, spec);
  const auto second_offsets = table_offsets(second.links, spec);
  std::vector<std::vector<std::uint8_t>> existing(spec.nodes);
  for (std::uint32_t i = 0; i < spec.nodes; ++i) {
    auto& bits = existing[i];
    const std::size_t a_begin = first_offsets[i];
    const std::size_t a_end = std::min(first_offsets[i + 1], table_cut);
    if (a_begin < a_end) {
      bits.insert(bits.end(), first.table_bits.begin() + static_cast<std::ptrdiff_t>(a_begin),
                  first.table_bits.begin() + static_cast<std::ptrdiff_t>(a_end));
    }
    const std::size_t b_begin = std::max(second_offsets[i], table_cut);
    const std::size_t b_end = second_offsets[i + 1];
    if (b_begin < b_end) {
      bits.insert(bits.end(), second.table_bits.begin() + static_cast<std::ptrdiff_t>(b_begin),
                  second.table_bits.begin() + static_cast<std::ptrdiff_t>(b_end));
    }
    if (bits.empty()) {
      bits.assign(second.table_bits.begin() + static_cast<std::ptrdiff_t>(second_offsets[i]),
                  second.table_bits.begin() + static_cast<std::ptrdiff_t>(second_offsets[i + 1]));
    }
  }
  child.table_bits = assemble_tables(existing, degrees_of(child.links, spec), spec);
  return child;
}

}  // namespace

std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, const NetworkSpec& spec, std::size_t cut) {
  return {cross_child(a, b, spec, cut), cross_child(b, a, spec, cut)};
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, const NetworkSpec& spec, Rng& rng) {
  const std::size_t cut = rng.uniform(std::min(a.size(), b.size()) + 1);
  std::pair<Genome, Genome> children;
  try {
    children = crossover_at(a, b, spec, cut);
  } catch (const DecodeError&) {
    // In-degree overflow past the table limit: keep the parents.
    children = {a, b};
  }
  enforce_feedforward(children.first, spec, rng);
  enforce_feedforward(children.second, spec, rng);
  return children;
}

void enforce_feedforward(Genome& genome, const NetworkSpec& spec, Rng& rng) {
  (void)spec;
  if (genome.order.empty()) return;
  std::vector<NodeId> by_rank;
  for (std::size_t i = 0; i + 1 < genome.links.size(); i += 2) {
    const NodeId source = genome.links[i];
    const NodeId destination = genome.links[i + 1];
    if (genome.order[source] < genome.order[destination]) continue;
    if (by_rank.empty()) by_rank = nodes_by_rank(genome.order);
    genome.links[i] = by_rank[rng.uniform(genome.order[destination])];
  }
}

BooleanNetwork enforce_feedforward(const BooleanNetwork& net, Rng& rng) {
  NetworkSpec shape;
  shape.nodes = net.node_count();
  shape.inputs = net.input_count();
  shape.outputs = net.output_count();
  Genome genome = encode(net);
  if (genome.order.empty()) return net;
  enforce_feedforward(genome, shape, rng);
  return decode(genome, shape);
}

}  // namespace rbn
