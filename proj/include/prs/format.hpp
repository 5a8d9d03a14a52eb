#pragma once

#include <cstdio>
#include <string>

namespace prs {

/// Shortest-round-trip-safe text for a double, used in every CSV writer so that
/// reruns are byte-identical.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace prs
