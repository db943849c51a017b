#pragma once

#include <cstdio>
#include <string>

namespace collab {

/// Nine significant digits, '.' decimal point, "inf"/"nan" for non-finite values.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace collab
