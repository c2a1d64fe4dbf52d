#include "rbn/network.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "rbn/error.hpp"

namespace rbn {

std::string to_string(WiringMode mode) {
  return mode == WiringMode::ExactL ? "exact" : "binomial";
}

WiringMode parse_wiring_mode(const std::string& text) {
  if (text == "exact" || text == "ExactL") return WiringMode::ExactL;
  if (text == "binomial" || text == "BinomialTrial") return WiringMode::BinomialTrial;
  throw ParseError("unknown wiring mode '" + text + "'");
}

LookupTable::LookupTable(std::uint32_t arity) : arity_(arity) {
  if (arity > kMaxArity) {
    throw InvalidSpecError("in-degree " + std::to_string(arity) + " exceeds the lookup table limit of " +
                           std::to_string(kMaxArity));
  }
  words_.assign((size() + 63) / 64, 0);
}

LookupTable LookupTable::hashed(std::uint32_t arity, std::uint64_t key) {
  if (arity > kMaxHashedArity) {
    throw InvalidSpecError("in-degree " + std::to_string(arity) + " exceeds the lookup table limit of " +
                           std::to_string(kMaxHashedArity));
  }
  LookupTable table;
  table.arity_ = arity;
  table.hashed_ = true;
  table.key_ = key;
  table.words_.clear();
  return table;
}

LookupTable LookupTable::random(std::uint32_t arity, Rng& rng) {
  if (arity > kMaxArity) return hashed(arity, rng.next());
  LookupTable table(arity);
  for (auto& w : table.words_) w = rng.next();
  if (table.size() < 64) table.words_[0] &= (std::uint64_t{1} << table.size()) - 1;
  return table;
}

LookupTable LookupTable::from_bits(std::span<const std::uint8_t> bits) {
  const auto n = bits.size();
  if (n == 0 || (n & (n - 1)) != 0) throw InvalidSpecError("lookup table length must be a power of two");
  LookupTable table(static_cast<std::uint32_t>(std::countr_zero(n)));
  for (std::size_t i = 0; i < n; ++i) table.set(i, bits[i] != 0);
  return table;
}

std::uint32_t NetworkSpec::link_draws() const {
  return static_cast<std::uint32_t>(std::llround(static_cast<double>(nodes) * connectivity));
}

void NetworkSpec::validate() const {
  if (nodes == 0) throw InvalidSpecError("N must be at least 1");
  if (inputs == 0) throw InvalidSpecError("I must be at least 1");
  if (outputs == 0) throw InvalidSpecError("O must be at least 1");
  if (outputs > nodes) throw InvalidSpecError("O must not exceed N");
  if (!(connectivity >= 0.0) || !std::isfinite(connectivity)) throw InvalidSpecError("K must be a finite value >= 0");
}

std::vector<std::uint32_t> in_degrees(std::span<const Link> links, std::uint32_t total_nodes) {
  std::vector<std::uint32_t> degree(total_nodes, 0);
  for (const auto& l : links) ++degree.at(l.destination);
  return degree;
}

BooleanNetwork::BooleanNetwork(std::uint32_t nodes, std::uint32_t inputs, std::uint32_t outputs,
                               std::vector<Link> links, std::vector<LookupTable> tables,
                               std::vector<std::uint32_t> order)
    : nodes_(nodes),
      inputs_(inputs),
      outputs_(outputs),
      links_(std::move(links)),
      tables_(std::move(tables)),
      order_(std::move(order)) {
  if (nodes_ == 0) throw InvalidSpecError("N must be at least 1");
  if (inputs_ == 0) throw InvalidSpecError("I must be at least 1");
  if (outputs_ == 0 || outputs_ > nodes_) throw InvalidSpecError("O must be in [1, N]");
  const std::uint32_t total = total_nodes();
  for (const auto& l : links_) {
    if (l.source >= total || l.destination >= total) throw InvalidSpecError("link endpoint out of range");
    if (l.destination < inputs_) throw InvalidSpecError("link destination is an input node");
  }
  if (tables_.size() != nodes_) throw InvalidSpecError("expected one lookup table per non-input node");
  if (!order_.empty()) {
    if (order_.size() != total) throw InvalidSpecError("order must rank every node");
    for (const auto& l : links_) {
      if (order_[l.source] >= order_[l.destination]) throw InvalidSpecError("link violates feedforward order");
    }
  }

  const auto degree = in_degrees(links_, total);
  source_offsets_.assign(total + 1, 0);
  for (std::uint32_t id = 0; id < total; ++id) source_offsets_[id + 1] = source_offsets_[id] + degree[id];
  source_ids_.resize(links_.size());
  auto fill = source_offsets_;
  for (const auto& l : links_) source_ids_[fill[l.destination]++] = l.source;

  for (std::uint32_t i = 0; i < nodes_; ++i) {
    if (tables_[i].arity() != degree[inputs_ + i]) {
      throw InvalidSpecError("lookup table of node " + std::to_string(inputs_ + i) + " has arity " +
                             std::to_string(tables_[i].arity()) + " but in-degree " +
                             std::to_string(degree[inputs_ + i]));
    }
  }
}

NodeRole BooleanNetwork::role(NodeId id) const noexcept {
  if (id < inputs_) return NodeRole::Input;
  if (id >= inputs_ + nodes_ - outputs_) return NodeRole::Output;
  return NodeRole::Compute;
}

std::span<const NodeId> BooleanNetwork::sources(NodeId id) const {
  return std::span<const NodeId>(source_ids_).subspan(source_offsets_.at(id),
                                                      source_offsets_.at(id + 1) - source_offsets_[id]);
}

std::vector<std::uint32_t> random_order(std::uint32_t nodes, std::uint32_t inputs, Rng& rng) {
  std::vector<std::uint32_t> ranks(nodes);
  std::iota(ranks.begin(), ranks.end(), inputs);
  for (std::uint32_t i = nodes; i > 1; --i) std::swap(ranks[i - 1], ranks[rng.uniform(i)]);
  std::vector<std::uint32_t> order(inputs + nodes);
  std::iota(order.begin(), order.begin() + inputs, 0U);
  std::copy(ranks.begin(), ranks.end(), order.begin() + inputs);
  return order;
}

BooleanNetwork build_random_network(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  const std::uint32_t total = spec.nodes + spec.inputs;
  std::vector<std::uint32_t> order;
  if (spec.feedforward) order = random_order(spec.nodes, spec.inputs, rng);

  const std::uint32_t draws = spec.link_draws();
  std::vector<Link> links;
  links.reserve(draws);
  for (std::uint32_t d = 0; d < draws; ++d) {
    Link link{};
    do {
      link.source = static_cast<NodeId>(rng.uniform(total));
      link.destination = spec.inputs + static_cast<NodeId>(rng.uniform(spec.nodes));
    } while (spec.feedforward && order[link.source] >= order[link.destination]);
    if (spec.wiring == WiringMode::BinomialTrial && !rng.bernoulli(0.5)) continue;
    links.push_back(link);
  }

  const auto degree = in_degrees(links, total);
  std::vector<LookupTable> tables;
  tables.reserve(spec.nodes);
  for (std::uint32_t i = 0; i < spec.nodes; ++i) tables.push_back(LookupTable::random(degree[spec.inputs + i], rng));
  return BooleanNetwork(spec.nodes, spec.inputs, spec.outputs, std::move(links), std::move(tables), std::move(order));
}

}  // namespace rbn
