#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace targetbench {

// Shortest decimal string that round-trips to the same double. Used by every
// CSV/JSON/SVG writer so that reruns produce byte-identical files.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace targetbench
