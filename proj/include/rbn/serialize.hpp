#pragma once

#include <iosfwd>
#include <string>

#include "rbn/network.hpp"

namespace rbn {

/// Line-oriented text form of a network:
///
///   N I O mode                 mode is "recurrent" or "feedforward"
///   src dst                    one line per link, in link-list order
///   <hex>                      one table per non-input node, ascending id
///   order r0 r1 ...            feedforward only: rank of every node
///
/// Tables are printed as a hexadecimal number whose bit i is table entry i,
/// zero-padded to ceil(2^K / 4) digits.
void write_network(std::ostream& out, const BooleanNetwork& net);
BooleanNetwork read_network(std::istream& in);

std::string network_to_string(const BooleanNetwork& net);
BooleanNetwork network_from_string(const std::string& text);

std::string table_to_hex(const LookupTable& table);
LookupTable table_from_hex(const std::string& hex, std::uint32_t arity);

}  // namespace rbn
