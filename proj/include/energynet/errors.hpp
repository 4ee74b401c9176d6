#pragma once

#include <stdexcept>
#include <string>

namespace energynet {

// Bad input: malformed documents, schema violations, broken preconditions
// on user-supplied data. Maps to CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: singular systems, eigensolver breakdown, conditioning
// limits. Maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace energynet
