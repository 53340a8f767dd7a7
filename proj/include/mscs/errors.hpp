#pragma once

#include <stdexcept>
#include <string>

namespace mscs {

// Invalid or inconsistent configuration (dimensions, parameters, flags).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Missing, truncated or malformed input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver (NaN, divergence).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mscs
