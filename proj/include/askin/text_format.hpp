#pragma once

#include <cstdio>
#include <string>

namespace askin {

/// Shortest-safe decimal form that round-trips a double exactly ("nan" for NaN).
inline std::string exact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

/// Fixed-point for human-readable tables.
inline std::string fixed(double value, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace askin
