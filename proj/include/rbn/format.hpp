#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace rbn {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double value) {
  char buffer[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

}  // namespace rbn
