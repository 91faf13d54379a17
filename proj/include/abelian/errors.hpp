#pragma once

#include <stdexcept>
#include <string>

namespace abelian {

// Base of everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition violations: bad dimensions, non-stochastic weights, malformed
// arguments. CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AlgebraMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotSelfAdjointError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BudgetError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failures that arise while computing on well-formed inputs. CLI maps these
// to exit code 1.
class ComputationError : public Error {
 public:
  using Error::Error;
};

// Scalar function applied outside its domain (e.g. log of a negative
// coefficient).
class FunctionDomainError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class DecodeError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace abelian
