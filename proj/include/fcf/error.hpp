#pragma once

#include <stdexcept>
#include <string>

namespace fcf {

/// Invalid user input: bad parameters, malformed drive files, bad ranges.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A computation could not meet its accuracy contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fcf
