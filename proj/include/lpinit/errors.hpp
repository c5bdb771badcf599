#pragma once

#include <stdexcept>

namespace lpinit {

/// Raised when a computation leaves the finite range (divergent integration,
/// blown-up training, non-finite objective).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a series or dataset is too short for the requested operation.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lpinit
