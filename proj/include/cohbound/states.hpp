#pragma once

#include <cmath>
#include <random>
#include <sstream>

#include "cohbound/common.hpp"
#include "cohbound/hermitian.hpp"
#include "cohbound/random.hpp"

namespace cohbound {

// Entropies are in bits (base-2 logs) throughout. Eigenvalues below
// kEntropyFloor are treated under the 0 log 0 = 0 convention.
inline constexpr double kEntropyFloor = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitTraceTol = 1e-10;
inline constexpr double kSupportTol = 1e-9;

/// Positive semidefinite, unit-trace Hermitian operator.
template <typename Real = double>
class DensityMatrix {
 public:
  explicit DensityMatrix(Hermitian<Real> op) : op_(std::move(op)) {
    const Real min_eig = eigh(op_).eigenvalues.minCoeff();
    if (min_eig < -Real(kPsdTol)) {
      std::ostringstream msg;
      msg << "DensityMatrix: eigenvalue " << min_eig << " below -" << kPsdTol;
      throw ValidationError(msg.str());
    }
    const Real tr = op_.trace();
    if (std::abs(tr - Real(1)) > Real(kUnitTraceTol)) {
      std::ostringstream msg;
      msg << "DensityMatrix: trace " << tr << " deviates from 1 beyond "
          << kUnitTraceTol;
      throw ValidationError(msg.str());
    }
  }

  static DensityMatrix from_ket(const ComplexVector<Real>& ket) {
    const Real n = ket.norm();
    if (!(n > Real(0))) {
      throw ValidationError("DensityMatrix::from_ket: zero vector");
    }
    const ComplexVector<Real> k = ket / n;
    return DensityMatrix(Hermitian<Real>::unchecked((k * k.adjoint()).eval()));
  }

  static DensityMatrix maximally_mixed(Index d) {
    return DensityMatrix(Hermitian<Real>::unchecked(
        ComplexMatrix<Real>::Identity(d, d) / Real(d)));
  }

  Index dim() const { return op_.dim(); }
  const Hermitian<Real>& op() const { return op_; }
  const ComplexMatrix<Real>& matrix() const { return op_.matrix(); }

 private:
  Hermitian<Real> op_;
};

/// Projects a Hermitian operator onto the density-matrix set: eigenvalues
/// clipped at zero, then renormalized to unit trace.
template <typename Real>
DensityMatrix<Real> clip_to_density(const Hermitian<Real>& h) {
  const Spectrum<Real> s = eigh(h);
  RealVector<Real> clipped = s.eigenvalues.cwiseMax(Real(0));
  const Real total = clipped.sum();
  if (!(total > Real(0))) {
    throw ValidationError("clip_to_density: operator has no positive part");
  }
  clipped /= total;
  ComplexMatrix<Real> out =
      s.eigenvectors * clipped.asDiagonal() * s.eigenvectors.adjoint();
  out = ((out + out.adjoint()) / Real(2)).eval();
  return DensityMatrix<Real>(Hermitian<Real>::unchecked(std::move(out)));
}

template <typename Real = double>
ComplexVector<Real> bell_minus_ket() {
  ComplexVector<Real> k = ComplexVector<Real>::Zero(4);
  const Real r = Real(1) / std::sqrt(Real(2));
  k(1) = r;
  k(2) = -r;
  return k;
}

template <typename Real = double>
ComplexVector<Real> bell_plus_ket() {
  ComplexVector<Real> k = ComplexVector<Real>::Zero(4);
  const Real r = Real(1) / std::sqrt(Real(2));
  k(1) = r;
  k(2) = r;
  return k;
}

template <typename Real = double>
DensityMatrix<Real> bell_minus() {
  return DensityMatrix<Real>::from_ket(bell_minus_ket<Real>());
}

template <typename Real = double>
DensityMatrix<Real> bell_plus() {
  return DensityMatrix<Real>::from_ket(bell_plus_ket<Real>());
}

/// Zeroes the off-diagonal entries in the computational basis.
template <typename Real>
DensityMatrix<Real> dephase(const DensityMatrix<Real>& rho) {
  ComplexVector<Real> d = rho.matrix().diagonal();
  for (Index i = 0; i < d.size(); ++i) {
    d(i) = std::complex<Real>(std::max(d(i).real(), Real(0)), Real(0));
  }
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(rho.dim(), rho.dim());
  m.diagonal() = d;
  return DensityMatrix<Real>(Hermitian<Real>::unchecked(std::move(m)));
}

namespace detail {

template <typename Real>
Real shannon_bits(const RealVector<Real>& w) {
  Real h = Real(0);
  for (Index i = 0; i < w.size(); ++i) {
    if (w[i] > Real(kEntropyFloor)) {
      h -= w[i] * std::log2(w[i]);
    }
  }
  return h;
}

}  // namespace detail

/// Von Neumann entropy in bits.
template <typename Real>
Real von_neumann_entropy(const DensityMatrix<Real>& rho) {
  return detail::shannon_bits<Real>(eigh(rho.op()).eigenvalues);
}

/// Quantum relative entropy S(rho||sigma) in bits. Throws SupportViolation
/// when rho has weight above kSupportTol on a null eigendirection of sigma.
template <typename Real>
Real rel_entropy(const DensityMatrix<Real>& rho,
                 const DensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ValidationError("rel_entropy: dimension mismatch");
  }
  const Spectrum<Real> sr = eigh(rho.op());
  Real tr_rho_log_rho = Real(0);
  for (Index i = 0; i < sr.eigenvalues.size(); ++i) {
    const Real w = sr.eigenvalues[i];
    if (w > Real(kEntropyFloor)) {
      tr_rho_log_rho += w * std::log2(w);
    }
  }
  const Spectrum<Real> ss = eigh(sigma.op());
  Real tr_rho_log_sigma = Real(0);
  for (Index j = 0; j < ss.eigenvalues.size(); ++j) {
    const Real s = ss.eigenvalues[j];
    const Real weight =
        (ss.eigenvectors.col(j).adjoint() * rho.matrix() *
         ss.eigenvectors.col(j))(0)
            .real();
    if (s > Real(kEntropyFloor)) {
      tr_rho_log_sigma += weight * std::log2(s);
    } else if (weight > Real(kSupportTol)) {
      std::ostringstream msg;
      msg << "rel_entropy: divergence is infinite; first state carries weight "
          << weight << " on eigendirection " << j
          << " where second state has eigenvalue " << s;
      throw SupportViolation(msg.str());
    }
  }
  return tr_rho_log_rho - tr_rho_log_sigma;
}

/// Relative entropy of coherence in bits: S(rho_diag) - S(rho), which equals
/// S(rho||rho_diag). The identity is cross-checked by tests against the
/// direct rel_entropy evaluation.
template <typename Real>
Real rec(const DensityMatrix<Real>& rho) {
  RealVector<Real> diag = rho.matrix().diagonal().real();
  return detail::shannon_bits<Real>(diag) - von_neumann_entropy(rho);
}

/// Two-qubit Werner state: p |psi-><psi-| + (1 - p) I/4.
template <typename Real = double>
DensityMatrix<Real> werner(Real p) {
  if (!(p >= Real(0) && p <= Real(1))) {
    throw DomainError("werner: p must lie in [0, 1]");
  }
  const ComplexVector<Real> k = bell_minus_ket<Real>();
  ComplexMatrix<Real> m =
      p * (k * k.adjoint()) +
      (Real(1) - p) / Real(4) * ComplexMatrix<Real>::Identity(4, 4);
  return DensityMatrix<Real>(Hermitian<Real>::unchecked(std::move(m)));
}

/// Closed-form coherence of werner(p): the diagonal entropy
/// h = -2 (1-p)/4 log (1-p)/4 - 2 (1+p)/4 log (1+p)/4 minus the spectral
/// entropy S = -(1+3p)/4 log (1+3p)/4 - 3 (1-p)/4 log (1-p)/4.
template <typename Real = double>
Real werner_rec_closed_form(Real p) {
  if (!(p >= Real(0) && p <= Real(1))) {
    throw DomainError("werner_rec_closed_form: p must lie in [0, 1]");
  }
  const auto xlog2x = [](Real x) {
    return x > Real(kEntropyFloor) ? x * std::log2(x) : Real(0);
  };
  const Real lo = (Real(1) - p) / Real(4);
  const Real hi = (Real(1) + p) / Real(4);
  const Real top = (Real(1) + Real(3) * p) / Real(4);
  const Real h = -Real(2) * xlog2x(lo) - Real(2) * xlog2x(hi);
  const Real s = -xlog2x(top) - Real(3) * xlog2x(lo);
  return h - s;
}

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
template <typename Real>
Real fidelity(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ValidationError("fidelity: dimension mismatch");
  }
  const Spectrum<Real> s = eigh(rho.op());
  const RealVector<Real> sqrt_w =
      s.eigenvalues.cwiseMax(Real(0)).cwiseSqrt();
  const ComplexMatrix<Real> root =
      s.eigenvectors * sqrt_w.asDiagonal() * s.eigenvectors.adjoint();
  ComplexMatrix<Real> inner = root * sigma.matrix() * root;
  inner = ((inner + inner.adjoint()) / Real(2)).eval();
  const RealVector<Real> mu =
      eigh(Hermitian<Real>::unchecked(std::move(inner))).eigenvalues;
  Real acc = Real(0);
  for (Index i = 0; i < mu.size(); ++i) {
    acc += std::sqrt(std::max(mu[i], Real(0)));
  }
  return acc * acc;
}

template <typename Real>
Real purity(const DensityMatrix<Real>& rho) {
  return rho.matrix().squaredNorm();
}

template <typename Real>
Real trace_distance(const DensityMatrix<Real>& rho,
                    const DensityMatrix<Real>& sigma) {
  const Hermitian<Real> diff = rho.op() - sigma.op();
  return eigh(diff).eigenvalues.cwiseAbs().sum() / Real(2);
}

/// Ginibre-induced random state G G† / tr(G G†) with G of shape d x rank
/// (Hilbert-Schmidt measure at rank = d). Deterministic given the generator.
template <typename Real = double>
DensityMatrix<Real> random_density(Index d, Index rank, std::mt19937_64& rng) {
  if (rank < 1 || rank > d) {
    throw ValidationError("random_density: rank must lie in [1, dim]");
  }
  const ComplexMatrix<Real> g = ginibre<Real>(d, rank, rng);
  ComplexMatrix<Real> m = g * g.adjoint();
  m /= m.trace().real();
  m = ((m + m.adjoint()) / Real(2)).eval();
  return DensityMatrix<Real>(Hermitian<Real>::unchecked(std::move(m)));
}

template <typename Real = double>
DensityMatrix<Real> random_density(Index d, Index rank, std::uint64_t seed) {
  std::mt19937_64 rng = seeded_rng(seed);
  return random_density<Real>(d, rank, rng);
}

}  // namespace cohbound
