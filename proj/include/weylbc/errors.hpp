#pragma once

#include <stdexcept>

namespace weylbc {

/// Invalid configuration or malformed input (CLI exit code 2).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical solve failure, e.g. a degenerate implicit step (CLI exit code 3).
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation requested outside the verified domain (CLI exit code 4).
struct domain_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace weylbc
