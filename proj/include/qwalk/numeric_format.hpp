#pragma once

#include <cstdio>
#include <string>

namespace qwalk {

/// Round-trip decimal rendering with '.' separator, independent of locale.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qwalk
