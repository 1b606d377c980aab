#pragma once

#include <stdexcept>
#include <string>

namespace ctmc {

/// Malformed or invalid model/config input.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A method's hypotheses do not hold for the given model; no certificate is issued.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical procedure failed (non-convergence, step-size underflow, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctmc
