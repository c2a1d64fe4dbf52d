#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace rbn {

/// Fixed-width bit string of at most 64 bits. Position 0 is the most
/// significant bit and corresponds to the first input (or output) node, so
/// str() prints positions left to right.
struct BitString {
  std::uint64_t value = 0;
  std::uint32_t width = 0;

  bool operator[](std::uint32_t position) const noexcept { return (value >> (width - 1 - position)) & 1U; }
  void set(std::uint32_t position, bool bit) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (width - 1 - position);
    value = bit ? (value | mask) : (value & ~mask);
  }
  std::uint32_t popcount() const noexcept { return static_cast<std::uint32_t>(std::popcount(value)); }

  std::string str() const;
  /// Parses a string of '0'/'1' characters; throws ParseError.
  static BitString parse(std::string_view text);

  friend bool operator==(const BitString&, const BitString&) = default;
};

}  // namespace rbn
