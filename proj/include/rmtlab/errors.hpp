#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

/// Invalid input: a precondition or a documented invariant was violated by
/// the caller. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation failed at run time (eigensolver non-convergence, an ODE
/// integration blow-up, I/O). Maps to CLI exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace rmt
