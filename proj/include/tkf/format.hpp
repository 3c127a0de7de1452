#pragma once

#include <cstdio>
#include <string>

namespace tkf {

// 17 significant digits: enough for double round-trip; C locale '.' decimal.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace tkf
