#pragma once

#include <stdexcept>
#include <string>

namespace ifm {

// Bad inputs: malformed files, out-of-range arguments, inconsistent market data.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of the numerics themselves: non-PSD matrices, diverged solvers,
// too many invalid Monte Carlo paths.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ifm
