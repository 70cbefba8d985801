#pragma once

#include <stdexcept>
#include <string>

namespace ekfp {

// Bad inputs: malformed configs, dimension mismatches, violated invariants.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numeric failures: non-finite values, singular systems.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ekfp
