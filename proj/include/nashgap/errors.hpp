#pragma once

#include <stdexcept>
#include <string>

namespace nashgap {

/// Argument does not match the block structure of the game or set.
class ConformanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value violates a hypothesis the algorithms rely on.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver failed to reach its tolerance, or produced non-finite values.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nashgap
