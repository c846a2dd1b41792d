#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace decaywatch {

// Reals are emitted with 17 significant digits so a written value parses
// back to the identical double.
inline std::string format_real(double x) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace decaywatch
