#pragma once

#include <cstdio>
#include <string>

namespace eep {

/// Round-trippable text form of a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace eep
