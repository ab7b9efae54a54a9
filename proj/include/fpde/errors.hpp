#pragma once

#include <stdexcept>
#include <string>

namespace fpde {

/// Bad user input: configs, constructor arguments, malformed files. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver state became unusable (NaN/Inf, no convergence where required). CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A contract the solver relies on was violated at runtime (ellipticity floor,
/// growth hypothesis, operator symmetry). CLI exit code 4.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fpde
