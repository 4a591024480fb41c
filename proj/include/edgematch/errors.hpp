#pragma once

#include <stdexcept>
#include <string>

namespace edgematch {

// Malformed puzzle/placement files.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Puzzle cannot be solved (unbalanced edge types, contradictory constraints).
struct UnsolvableError : std::runtime_error {
  explicit UnsolvableError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver broke down numerically or a recovery/extraction check failed.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace edgematch
