#pragma once

#include <stdexcept>
#include <string>

namespace hqrc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad dimensions, out-of-range qubit counts,
/// unknown registry names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an API precondition (empty inputs, length mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a singular solve. Carries the step index when the
/// fault happens inside a time loop.
class NumericFault : public Error {
 public:
  explicit NumericFault(const std::string& what, long step = -1)
      : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hqrc
