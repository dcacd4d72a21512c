#pragma once

#include <stdexcept>
#include <string>

namespace tdi {

/// A documented precondition or parameter constraint was violated. The
/// message names the inequality, e.g. "tau < 35/34".
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured resource budget (memory, triple count) was exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent computations of the same quantity disagreed beyond
/// their stated tolerance.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampled derivative of a phase does not satisfy |f^(k)| ~ lambda.
class RegimeError : public ConstraintError {
 public:
  using ConstraintError::ConstraintError;
};

}  // namespace tdi
