#pragma once

#include <stdexcept>
#include <string>

namespace targetbench {

// All recoverable failures (bad input, infeasible configuration, I/O) are
// reported through this type. Internal invariant violations use it too,
// prefixed with "internal:".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

}  // namespace targetbench
