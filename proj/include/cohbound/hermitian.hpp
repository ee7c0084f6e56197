#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "cohbound/common.hpp"

namespace cohbound {

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceImagTol = 1e-9;

/// Dense complex Hermitian matrix. Construction symmetrizes (H + H†)/2 when
/// the entrywise asymmetry is below kHermiticityTol and rejects otherwise,
/// so floating-point noise is absorbed without masking real bugs.
template <typename Real = double>
class Hermitian {
 public:
  using Matrix = ComplexMatrix<Real>;
  using Scalar = std::complex<Real>;

  explicit Hermitian(Matrix m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      throw ValidationError("Hermitian: matrix must be square with dim >= 1");
    }
    const Real asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= Real(kHermiticityTol))) {
      std::ostringstream msg;
      msg << "Hermitian: asymmetry norm " << asym << " exceeds tolerance "
          << kHermiticityTol;
      throw ValidationError(msg.str());
    }
    mat_ = ((m + m.adjoint()) / Real(2)).eval();
  }

  /// Wraps a matrix that is Hermitian by construction (no check, no copy of
  /// the symmetrized form). For internal exact constructions only.
  static Hermitian unchecked(Matrix m) {
    Hermitian h;
    h.mat_ = std::move(m);
    return h;
  }

  static Hermitian identity(Index d) {
    return unchecked(Matrix::Identity(d, d));
  }

  static Hermitian zero(Index d) { return unchecked(Matrix::Zero(d, d)); }

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  Scalar operator()(Index i, Index j) const { return mat_(i, j); }
  Real trace() const { return mat_.trace().real(); }

 private:
  Hermitian() = default;
  Matrix mat_;
};

template <typename Real>
Hermitian<Real> operator+(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("Hermitian operator+: dimension mismatch");
  }
  return Hermitian<Real>::unchecked(a.matrix() + b.matrix());
}

template <typename Real>
Hermitian<Real> operator-(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("Hermitian operator-: dimension mismatch");
  }
  return Hermitian<Real>::unchecked(a.matrix() - b.matrix());
}

template <typename Real>
Hermitian<Real> operator*(Real s, const Hermitian<Real>& a) {
  return Hermitian<Real>::unchecked(s * a.matrix());
}

template <typename Real>
Hermitian<Real> operator*(const Hermitian<Real>& a, Real s) {
  return s * a;
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// orthonormal eigenvector columns.
template <typename Real = double>
struct Spectrum {
  RealVector<Real> eigenvalues;
  ComplexMatrix<Real> eigenvectors;

  ComplexMatrix<Real> reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() *
           eigenvectors.adjoint();
  }
};

template <typename Real>
Spectrum<Real> eigh(const Hermitian<Real>& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigendecomposition failed to converge");
  }
  return Spectrum<Real>{solver.eigenvalues(), solver.eigenvectors()};
}

/// Spectral evaluation of a real scalar function: V diag(g(w)) V†.
/// Throws DomainError if g is not finite at some eigenvalue.
template <typename Real, typename Fn>
Hermitian<Real> matrix_fn(const Hermitian<Real>& h, Fn&& g) {
  const Spectrum<Real> s = eigh(h);
  RealVector<Real> mapped(s.eigenvalues.size());
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const Real y = g(s.eigenvalues[i]);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "matrix_fn: function undefined at eigenvalue "
          << s.eigenvalues[i] << " (index " << i << ")";
      throw DomainError(msg.str());
    }
    mapped[i] = y;
  }
  ComplexMatrix<Real> out =
      s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.adjoint();
  // the product is Hermitian up to rounding; fold the residue away
  out = ((out + out.adjoint()) / Real(2)).eval();
  return Hermitian<Real>::unchecked(std::move(out));
}

/// 2^H, evaluated spectrally.
template <typename Real>
Hermitian<Real> exp2m(const Hermitian<Real>& h) {
  return matrix_fn(h, [](Real x) { return std::exp2(x); });
}

/// log2(H); requires a strictly positive spectrum.
template <typename Real>
Hermitian<Real> log2m(const Hermitian<Real>& h) {
  return matrix_fn(h, [](Real x) { return std::log2(x); });
}

/// Kronecker (tensor) product.
template <typename Real>
Hermitian<Real> tensor(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  return Hermitian<Real>::unchecked(
      Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

/// tr(AB) for Hermitian A, B; mathematically real. An imaginary residue
/// above kTraceImagTol indicates a corrupted operand and raises.
template <typename Real>
Real trace_product(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("trace_product: dimension mismatch");
  }
  // tr(AB) = sum_ij A_ij conj(B_ij) when B is Hermitian
  const std::complex<Real> t =
      (a.matrix().array() * b.matrix().array().conjugate()).sum();
  if (std::abs(t.imag()) > Real(kTraceImagTol)) {
    std::ostringstream msg;
    msg << "trace_product: imaginary residue " << t.imag()
        << " exceeds tolerance " << kTraceImagTol;
    throw NumericalError(msg.str());
  }
  return t.real();
}

/// Largest absolute eigenvalue.
template <typename Real>
Real spectral_norm(const Hermitian<Real>& h) {
  return eigh(h).eigenvalues.cwiseAbs().maxCoeff();
}

}  // namespace cohbound
