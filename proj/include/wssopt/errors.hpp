#pragma once

#include <stdexcept>
#include <string>

namespace wssopt {

/// Base class for numerical failures (as opposed to bad user input).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A symmetric factorization failed: the matrix is not positive-definite.
class PositiveDefinitenessError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// A circulant construction produced a non-positive DFT eigenvalue.
/// Carries the offending eigenvalue and its index; the usual fix is a larger n.
class NonPositiveEigenvalueError : public NumericalError {
  public:
    NonPositiveEigenvalueError(double eigenvalue, int index)
        : NumericalError("circulant eigenvalue " + std::to_string(eigenvalue) +
                         " at index " + std::to_string(index) + " is not positive"),
          eigenvalue_(eigenvalue),
          index_(index) {}

    double eigenvalue() const { return eigenvalue_; }
    int index() const { return index_; }

  private:
    double eigenvalue_;
    int index_;
};

/// A power allocation violates its constraints, or the constraint set is empty.
class ConstraintViolationError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// An internal consistency inequality was violated beyond numerical slack.
class DiagnosticError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace wssopt
