#pragma once

#include <stdexcept>
#include <string>

namespace romforge {

/// Invalid user input: configuration, file contents, incompatible artifacts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed: divergence, non-finite values, singular
/// systems, non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace romforge
