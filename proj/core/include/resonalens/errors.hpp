#pragma once

#include <stdexcept>
#include <string>

namespace resonalens {

/// Invalid input parameters or configuration. Exit code 1 at the CLI.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A combination of otherwise valid options that is not supported.
class UnsupportedCombination : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure: factorization breakdown, failed certification, ...
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resonalens
