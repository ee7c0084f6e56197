#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cohbound {

using Index = Eigen::Index;

template <typename Real = double>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real = double>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real = double>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Base for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied data violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A mathematical operation was requested outside its domain
/// (e.g. the logarithm of a nonpositive eigenvalue).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (a bug or severe ill-conditioning).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Relative entropy is infinite: the first state has weight outside the
/// support of the second.
class SupportViolation : public Error {
 public:
  using Error::Error;
};

/// The dual exponent grew past the configured cap. The solver maps this
/// to a Diverged status; it usually signals infeasible input data.
class ExponentOverflow : public Error {
 public:
  using Error::Error;
};

/// The direct minimizer could not reach the required constraint residuals.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cohbound
