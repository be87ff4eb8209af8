#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace wmcf {

// Full round-trip formatting, 17 significant digits.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest representation that round-trips to the same double.
inline std::string format_short(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace wmcf
