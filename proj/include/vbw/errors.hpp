#pragma once

#include <stdexcept>
#include <string>

namespace vbw {

/// Bad user input: malformed or inconsistent configuration, infeasible
/// specifications, wrong vector sizes.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigurationError : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleSpecError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// The normal equations could not be solved reliably.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace vbw
