#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace spine {

/// Round-trip decimal text for a double; "inf"/"-inf"/"nan" for specials.
inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spine
