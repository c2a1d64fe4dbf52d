#include "rbn/serialize.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "rbn/error.hpp"

namespace rbn {

std::string table_to_hex(const LookupTable& table) {
  static constexpr char kDigits[] = "0123456789abcdef";
  if (table.is_hashed()) {
    char key[20];
    std::snprintf(key, sizeof key, "#%016llx", static_cast<unsigned long long>(table.key()));
    return key;
  }
  const std::size_t digits = (table.size() + 3) / 4;
  std::string text(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned nibble = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t index = d * 4 + b;
      if (index < table.size() && table.get(index)) nibble |= 1U << b;
    }
    text[digits - 1 - d] = kDigits[nibble];
  }
  return text;
}

LookupTable table_from_hex(const std::string& hex, std::uint32_t arity) {
  if (!hex.empty() && hex.front() == '#') {
    if (arity <= kMaxArity) throw ParseError("hashed table '" + hex + "' on a node of in-degree " + std::to_string(arity));
    std::size_t used = 0;
    std::uint64_t key = 0;
    try {
      key = std::stoull(hex.substr(1), &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != hex.size() - 1) throw ParseError("invalid hashed table '" + hex + "'");
    return LookupTable::hashed(arity, key);
  }
  LookupTable table(arity);
  const std::size_t digits = (table.size() + 3) / 4;
  if (hex.size() != digits) {
    throw ParseError("table '" + hex + "' should have " + std::to_string(digits) + " hex digits for arity " +
                     std::to_string(arity));
  }
  for (std::size_t d = 0; d < digits; ++d) {
    const char c = hex[digits - 1 - d];
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw ParseError("invalid hex digit in table '" + hex + "'");
    }
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t index = d * 4 + b;
      if (!((nibble >> b) & 1U)) continue;
      if (index >= table.size()) throw ParseError("table '" + hex + "' sets bits beyond its length");
      table.set(index, true);
    }
  }
  return table;
}

void write_network(std::ostream& out, const BooleanNetwork& net) {
  out << net.node_count() << ' ' << net.input_count() << ' ' << net.output_count() << ' '
      << (net.feedforward() ? "feedforward" : "recurrent") << '\n';
  for (const auto& l : net.links()) out << l.source << ' ' << l.destination << '\n';
  for (const auto& t : net.tables()) out << table_to_hex(t) << '\n';
  if (net.feedforward()) {
    out << "order";
    for (auto r : net.order()) out << ' ' << r;
    out << '\n';
  }
}

BooleanNetwork read_network(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("empty network text");

  std::uint32_t nodes = 0, inputs = 0, outputs = 0;
  std::string mode;
  {
    std::istringstream header(line);
    if (!(header >> nodes >> inputs >> outputs >> mode)) throw ParseError("malformed header '" + line + "'");
    if (mode != "recurrent" && mode != "feedforward") throw ParseError("unknown mode '" + mode + "'");
  }
  const std::uint32_t total = nodes + inputs;

  std::vector<Link> links;
  std::vector<std::string> hex_tables;
  std::vector<std::uint32_t> order;
  while (next_line()) {
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.front() == "order") {
      for (std::size_t i = 1; i < tokens.size(); ++i) order.push_back(static_cast<std::uint32_t>(std::stoul(tokens[i])));
    } else if (tokens.size() == 2) {
      if (!hex_tables.empty()) throw ParseError("link line after table lines: '" + line + "'");
      links.push_back(Link{static_cast<NodeId>(std::stoul(tokens[0])), static_cast<NodeId>(std::stoul(tokens[1]))});
    } else if (tokens.size() == 1) {
      hex_tables.push_back(tokens[0]);
    } else {
      throw ParseError("unrecognized line '" + line + "'");
    }
  }
  if (hex_tables.size() != nodes) throw ParseError("expected " + std::to_string(nodes) + " table lines");
  if (mode == "feedforward" && order.size() != total) throw ParseError("feedforward network needs a full order line");
  if (mode == "recurrent" && !order.empty()) throw ParseError("recurrent network must not carry an order line");

  for (const auto& l : links) {
    if (l.destination >= total) throw ParseError("link destination out of range");
  }
  const auto degree = in_degrees(links, total);
  std::vector<LookupTable> tables;
  tables.reserve(nodes);
  for (std::uint32_t i = 0; i < nodes; ++i) tables.push_back(table_from_hex(hex_tables[i], degree[inputs + i]));
  return BooleanNetwork(nodes, inputs, outputs, std::move(links), std::move(tables), std::move(order));
}

std::string network_to_string(const BooleanNetwork& net) {
  std::ostringstream out;
  write_network(out, net);
  return out.str();
}

BooleanNetwork network_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_network(in);
}

}  // namespace rbn
