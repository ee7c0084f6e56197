#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "cohbound/common.hpp"
#include "cohbound/hermitian.hpp"
#include "cohbound/measurement.hpp"
#include "cohbound/random.hpp"
#include "cohbound/states.hpp"

namespace cohbound {

// Certified lower bound on the relative entropy of coherence via gradient
// ascent on the concave dual
//
//   f(lambda) = -(log2 e / e) tr[2^(log2(p.b) - lambda.o')] - lambda.q'
//
// where o' is the observable list augmented with the identity and q' the
// expectation list augmented with 1. The maximizer yields the bound, and the
// matching primal candidate is rho(lambda) = (1/e) 2^(log2(p.b) - lambda.o').
// Any f value is a valid lower bound by weak duality, so an unconverged run
// still certifies.

template <typename Real = double>
struct SolverConfig {
  Real learning_rate = Real(0.05);
  Real tolerance = Real(1e-5);  // stop when ||grad f||_2 <= tolerance
  long max_iters = 1'000'000;
  Real prob_floor = Real(1e-12);  // zero basis probabilities are floored here
  Real divergence_bound = Real(1e6);  // on ||lambda||_2
  // cap on base-2 exponent eigenvalues before declaring divergence
  Real exponent_cap = Real(700) * std::numbers::ln2_v<Real>;
  // Armijo backtracking with step doubling instead of the fixed-rate update;
  // same stopping rule, usually far fewer iterations on ill-conditioned data
  bool line_search = false;
  // when set, lambda starts uniform in [-1, 1]^m instead of at zero
  std::optional<std::uint64_t> random_init_seed;

  void validate() const {
    if (!(learning_rate > Real(0)) || !(tolerance > Real(0)) ||
        max_iters < 1 || !(prob_floor > Real(0)) ||
        !(divergence_bound > Real(0)) || !(exponent_cap > Real(0))) {
      throw ValidationError("SolverConfig: all fields must be positive");
    }
  }
};

enum class SolveStatus { Converged, MaxIters, Diverged };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIters:
      return "max_iters";
    case SolveStatus::Diverged:
      return "diverged";
  }
  return "unknown";
}

/// The dual data: diagonal log reference log2(p.b) (after flooring and
/// renormalization) and the augmented observable/expectation lists.
template <typename Real = double>
struct DualProblem {
  Index dim = 0;
  RealVector<Real> log_probs;  // diagonal of log2(p.b)
  std::vector<Hermitian<Real>> aug_observables;  // [o..., I]
  RealVector<Real> aug_expectations;             // [q..., 1]

  Index multipliers() const { return aug_expectations.size(); }

  Hermitian<Real> log_ref() const {
    ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(dim, dim);
    m.diagonal() = log_probs.template cast<std::complex<Real>>();
    return Hermitian<Real>::unchecked(std::move(m));
  }

  void validate() const {
    if (dim < 1 || log_probs.size() != dim) {
      throw ValidationError("DualProblem: bad dimension");
    }
    if (aug_observables.empty() ||
        static_cast<Index>(aug_observables.size()) != aug_expectations.size()) {
      throw ValidationError("DualProblem: augmented lists inconsistent");
    }
    for (const auto& o : aug_observables) {
      if (o.dim() != dim) {
        throw ValidationError("DualProblem: observable dimension mismatch");
      }
    }
    const auto& last = aug_observables.back();
    if (!last.matrix().isIdentity(Real(1e-12)) ||
        aug_expectations[aug_expectations.size() - 1] != Real(1)) {
      throw ValidationError(
          "DualProblem: last augmented pair must be (identity, 1)");
    }
  }
};

/// Floors and renormalizes the basis probabilities, takes their log, and
/// augments the observables with the identity.
template <typename Real>
DualProblem<Real> build_problem(const MeasurementRecord<Real>& record,
                                const SolverConfig<Real>& config) {
  record.validate();
  config.validate();
  DualProblem<Real> prob;
  prob.dim = record.dim;
  RealVector<Real> floored = record.basis_probs.cwiseMax(config.prob_floor);
  floored /= floored.sum();
  prob.log_probs =
      floored.unaryExpr([](Real x) { return std::log2(x); }).eval();
  prob.aug_observables = record.observables;
  prob.aug_observables.push_back(Hermitian<Real>::identity(record.dim));
  prob.aug_expectations.resize(record.expectations.size() + 1);
  prob.aug_expectations.head(record.expectations.size()) = record.expectations;
  prob.aug_expectations[record.expectations.size()] = Real(1);
  prob.validate();
  return prob;
}

/// One dual evaluation: value, gradient, and the (unnormalized) spectral
/// exponential P = 2^(log2(p.b) - lambda.o'), from which the primal
/// candidate is P/e.
template <typename Real = double>
struct DualEval {
  Real value = Real(0);
  RealVector<Real> gradient;
  Real max_exponent = Real(0);
  ComplexMatrix<Real> pow2;  // 2^exponent

  Real grad_norm() const { return gradient.norm(); }
};

template <typename Real>
DualEval<Real> evaluate_dual(const DualProblem<Real>& prob,
                             const RealVector<Real>& lambda,
                             Real exponent_cap) {
  if (lambda.size() != prob.multipliers()) {
    throw ValidationError("evaluate_dual: lambda has length " +
                          std::to_string(lambda.size()) + ", expected " +
                          std::to_string(prob.multipliers()));
  }
  const Index d = prob.dim;
  ComplexMatrix<Real> exponent = ComplexMatrix<Real>::Zero(d, d);
  exponent.diagonal() = prob.log_probs.template cast<std::complex<Real>>();
  for (Index j = 0; j < lambda.size(); ++j) {
    if (lambda[j] != Real(0)) {
      exponent.noalias() -=
          lambda[j] * prob.aug_observables[static_cast<std::size_t>(j)].matrix();
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(exponent);
  if (es.info() != Eigen::Success) {
    throw NumericalError("evaluate_dual: eigendecomposition failed");
  }

  DualEval<Real> out;
  out.max_exponent = es.eigenvalues().maxCoeff();
  if (out.max_exponent > exponent_cap) {
    std::ostringstream msg;
    msg << "evaluate_dual: exponent eigenvalue " << out.max_exponent
        << " exceeds cap " << exponent_cap;
    throw ExponentOverflow(msg.str());
  }
  const RealVector<Real> pow2_eigs =
      es.eigenvalues().unaryExpr([](Real x) { return std::exp2(x); }).eval();
  out.pow2.noalias() = es.eigenvectors() * pow2_eigs.asDiagonal() *
                       es.eigenvectors().adjoint();

  constexpr Real log2e = std::numbers::log2e_v<Real>;
  constexpr Real inv_e = Real(1) / std::numbers::e_v<Real>;
  out.value = -log2e * inv_e * pow2_eigs.sum() -
              lambda.dot(prob.aug_expectations);
  out.gradient.resize(lambda.size());
  for (Index j = 0; j < lambda.size(); ++j) {
    const auto& obs =
        prob.aug_observables[static_cast<std::size_t>(j)].matrix();
    // tr(P O) = sum_ij P_ij conj(O_ij) for Hermitian O
    const Real tr =
        (out.pow2.array() * obs.array().conjugate()).sum().real();
    out.gradient[j] = inv_e * tr - prob.aug_expectations[j];
  }
  return out;
}

template <typename Real>
Real objective(const DualProblem<Real>& prob, const RealVector<Real>& lambda) {
  SolverConfig<Real> defaults;
  return evaluate_dual(prob, lambda, defaults.exponent_cap).value;
}

template <typename Real>
RealVector<Real> gradient(const DualProblem<Real>& prob,
                          const RealVector<Real>& lambda) {
  SolverConfig<Real> defaults;
  return evaluate_dual(prob, lambda, defaults.exponent_cap).gradient;
}

/// Primal candidate rho(lambda) = (1/e) 2^(log2(p.b) - lambda.o').
/// Positive definite Hermitian; unit trace only at dual optimality.
template <typename Real>
Hermitian<Real> primal(const DualProblem<Real>& prob,
                       const RealVector<Real>& lambda) {
  SolverConfig<Real> defaults;
  DualEval<Real> e = evaluate_dual(prob, lambda, defaults.exponent_cap);
  constexpr Real inv_e = Real(1) / std::numbers::e_v<Real>;
  ComplexMatrix<Real> m = inv_e * e.pow2;
  m = ((m + m.adjoint()) / Real(2)).eval();
  return Hermitian<Real>::unchecked(std::move(m));
}

template <typename Real = double>
struct SolverResult {
  RealVector<Real> multipliers;
  Real beta = Real(0);  // bits; objective value at `multipliers`
  long iterations = 0;  // accepted lambda updates
  long evaluations = 0;
  Real grad_norm = Real(0);
  Hermitian<Real> primal_candidate = Hermitian<Real>::zero(1);
  SolveStatus status = SolveStatus::MaxIters;
  long ascent_violations = 0;  // fixed-rate steps that decreased f beyond 1e-9
};

/// Signed residuals tr(rho o'_j) - q'_j for a primal candidate; the last
/// entry is the trace residual.
template <typename Real>
RealVector<Real> constraint_residuals(const DualProblem<Real>& prob,
                                      const Hermitian<Real>& rho) {
  RealVector<Real> r(prob.multipliers());
  for (Index j = 0; j < r.size(); ++j) {
    r[j] = trace_product(rho, prob.aug_observables[static_cast<std::size_t>(j)]) -
           prob.aug_expectations[j];
  }
  return r;
}

namespace detail {

template <typename Real>
RealVector<Real> initial_lambda(const SolverConfig<Real>& config, Index m) {
  if (config.random_init_seed) {
    std::mt19937_64 rng = seeded_rng(*config.random_init_seed);
    std::uniform_real_distribution<Real> uni(Real(-1), Real(1));
    RealVector<Real> lambda(m);
    for (Index j = 0; j < m; ++j) {
      lambda[j] = uni(rng);
    }
    return lambda;
  }
  return RealVector<Real>::Zero(m);
}

template <typename Real>
SolverResult<Real> finish_result(SolverResult<Real>&& result, SolveStatus status,
                                 const RealVector<Real>& lambda,
                                 const DualEval<Real>& eval) {
  result.status = status;
  result.multipliers = lambda;
  result.beta = eval.value;
  result.grad_norm = eval.grad_norm();
  constexpr Real inv_e = Real(1) / std::numbers::e_v<Real>;
  ComplexMatrix<Real> p = inv_e * eval.pow2;
  p = ((p + p.adjoint()) / Real(2)).eval();
  result.primal_candidate = Hermitian<Real>::unchecked(std::move(p));
  return std::move(result);
}

/// The paper-faithful update: a fixed learning rate on the full multiplier
/// vector, identity included. Iteration counts from this path are the
/// benchmarking quantity.
template <typename Real>
SolverResult<Real> solve_fixed_rate(const DualProblem<Real>& prob,
                                    const SolverConfig<Real>& config,
                                    RealVector<Real> lambda) {
  SolverResult<Real> result;
  DualEval<Real> eval;
  try {
    eval = evaluate_dual(prob, lambda, config.exponent_cap);
  } catch (const ExponentOverflow&) {
    result.status = SolveStatus::Diverged;
    result.multipliers = lambda;
    return result;
  }
  result.evaluations = 1;

  // best-so-far is reported when the iteration budget runs out
  RealVector<Real> best_lambda = lambda;
  DualEval<Real> best_eval = eval;

  while (true) {
    if (eval.grad_norm() <= config.tolerance) {
      return finish_result(std::move(result), SolveStatus::Converged, lambda,
                           eval);
    }
    if (result.iterations >= config.max_iters) {
      return finish_result(std::move(result), SolveStatus::MaxIters,
                           best_lambda, best_eval);
    }
    if (lambda.norm() > config.divergence_bound) {
      return finish_result(std::move(result), SolveStatus::Diverged, lambda,
                           eval);
    }

    const RealVector<Real> next =
        lambda + config.learning_rate * eval.gradient;
    DualEval<Real> next_eval;
    try {
      next_eval = evaluate_dual(prob, next, config.exponent_cap);
    } catch (const ExponentOverflow&) {
      ++result.evaluations;
      return finish_result(std::move(result), SolveStatus::Diverged, lambda,
                           eval);
    }
    ++result.evaluations;
    if (next_eval.value < eval.value - Real(1e-9)) {
      ++result.ascent_violations;
    }
    lambda = next;
    eval = std::move(next_eval);
    ++result.iterations;
    if (eval.value > best_eval.value) {
      best_eval = eval;
      best_lambda = lambda;
    }
  }
}

/// Evaluation of the dual with the identity multiplier maximized out
/// analytically. Writing B = log2(p.b) - lambda_rest . o and t = tr 2^B, the
/// optimal identity multiplier is log2(t) - log2(e), the primal candidate is
/// the normalized 2^B / t, and the reduced objective becomes
///   f(lambda_rest) = -log2 tr 2^B - lambda_rest . q.
/// Evaluated in log-sum-exp form, so no exponent can overflow.
template <typename Real>
struct ReducedEval {
  Real value = Real(0);
  RealVector<Real> gradient;  // over the non-identity multipliers
  Real lambda_identity = Real(0);
  ComplexMatrix<Real> primal;  // unit trace by construction

  Real grad_norm() const { return gradient.norm(); }
};

template <typename Real>
ReducedEval<Real> evaluate_reduced(const DualProblem<Real>& prob,
                                   const RealVector<Real>& lambda_rest) {
  const Index d = prob.dim;
  const Index k = prob.multipliers() - 1;
  if (lambda_rest.size() != k) {
    throw ValidationError("evaluate_reduced: multiplier length mismatch");
  }
  ComplexMatrix<Real> exponent = ComplexMatrix<Real>::Zero(d, d);
  exponent.diagonal() = prob.log_probs.template cast<std::complex<Real>>();
  for (Index j = 0; j < k; ++j) {
    if (lambda_rest[j] != Real(0)) {
      exponent.noalias() -=
          lambda_rest[j] *
          prob.aug_observables[static_cast<std::size_t>(j)].matrix();
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(exponent);
  if (es.info() != Eigen::Success) {
    throw NumericalError("evaluate_reduced: eigendecomposition failed");
  }
  const Real wmax = es.eigenvalues().maxCoeff();
  const RealVector<Real> shifted = es.eigenvalues().unaryExpr(
      [wmax](Real x) { return std::exp2(x - wmax); });
  const Real scale = shifted.sum();
  const Real log_trace = wmax + std::log2(scale);

  ReducedEval<Real> out;
  out.lambda_identity = log_trace - std::numbers::log2e_v<Real>;
  out.primal.noalias() = es.eigenvectors() * (shifted / scale).asDiagonal() *
                         es.eigenvectors().adjoint();
  out.value = -log_trace;
  out.gradient.resize(k);
  for (Index j = 0; j < k; ++j) {
    const auto& obs =
        prob.aug_observables[static_cast<std::size_t>(j)].matrix();
    const Real tr = (out.primal.array() * obs.array().conjugate()).sum().real();
    out.gradient[j] = tr - prob.aug_expectations[j];
    out.value -= lambda_rest[j] * prob.aug_expectations[j];
  }
  return out;
}

/// Robust path: Armijo backtracking with step doubling on the reduced dual.
/// Same stopping rule (full gradient norm), usually orders of magnitude
/// fewer iterations than the fixed-rate update on near-degenerate data.
template <typename Real>
SolverResult<Real> solve_line_search(const DualProblem<Real>& prob,
                                     const SolverConfig<Real>& config,
                                     const RealVector<Real>& lambda_full) {
  const Index k = prob.multipliers() - 1;
  RealVector<Real> lambda = lambda_full.head(k);

  SolverResult<Real> result;
  ReducedEval<Real> eval = evaluate_reduced(prob, lambda);
  result.evaluations = 1;
  RealVector<Real> best_lambda = lambda;
  ReducedEval<Real> best_eval = eval;

  const Real armijo = Real(1e-4);
  const long eval_budget = 8 * config.max_iters;
  Real step = Real(1);
  SolveStatus status = SolveStatus::MaxIters;

  while (true) {
    if (eval.grad_norm() <= config.tolerance * Real(0.99)) {
      status = SolveStatus::Converged;
      break;
    }
    if (result.iterations >= config.max_iters ||
        result.evaluations >= eval_budget) {
      lambda = best_lambda;
      eval = best_eval;
      status = SolveStatus::MaxIters;
      break;
    }
    if (std::hypot(lambda.norm(), eval.lambda_identity) >
        config.divergence_bound) {
      status = SolveStatus::Diverged;
      break;
    }

    // A step needs sufficient ascent plus a curvature bound; the curvature
    // test rejects reflective overshoots that Armijo alone would accept,
    // which otherwise lock the step controller into a two-cycle around the
    // maximizer. Once the expected ascent falls below the objective's
    // rounding noise, neither comparison carries information, so acceptance
    // switches to gradient-norm contraction; the gradient comes from traces,
    // not differences, and stays accurate there.
    const Real g2 = eval.gradient.squaredNorm();
    const Real noise_floor =
        Real(1e-15) * (Real(1) + std::abs(eval.value));
    bool accepted = false;
    bool stalled = false;
    bool first_try = true;
    while (!accepted && result.evaluations < eval_budget) {
      const RealVector<Real> next = lambda + step * eval.gradient;
      ReducedEval<Real> next_eval = evaluate_reduced(prob, next);
      ++result.evaluations;
      const bool ascent_ok =
          next_eval.value >= eval.value + armijo * step * g2 &&
          std::abs(next_eval.gradient.dot(eval.gradient)) <= Real(0.9) * g2;
      const bool contraction_ok =
          armijo * step * g2 <= noise_floor &&
          next_eval.grad_norm() <= eval.grad_norm() * Real(0.997);
      if (ascent_ok || contraction_ok) {
        lambda = next;
        eval = std::move(next_eval);
        accepted = true;
        if (first_try) {
          step = std::min(step * Real(2), Real(1e8));
        }
      } else {
        first_try = false;
        step /= Real(2);
        if (step < Real(1e-14)) {
          stalled = true;  // numerical optimum for this precision
          break;
        }
      }
    }
    if (!accepted) {
      if (stalled) {
        lambda = best_lambda;
        eval = best_eval;
        status = SolveStatus::MaxIters;
        break;
      }
      continue;  // hit the evaluation budget mid-search
    }
    ++result.iterations;
    if (eval.value > best_eval.value) {
      best_eval = eval;
      best_lambda = lambda;
    }
  }

  // one full evaluation at the assembled multiplier vector, so the reported
  // beta, gradient, and primal are exactly the documented quantities
  RealVector<Real> full(k + 1);
  full.head(k) = lambda;
  full[k] = eval.lambda_identity;
  DualEval<Real> final_eval;
  try {
    final_eval = evaluate_dual(prob, full, config.exponent_cap);
  } catch (const ExponentOverflow&) {
    result.status = SolveStatus::Diverged;
    result.multipliers = full;
    return result;
  }
  ++result.evaluations;
  if (status == SolveStatus::Converged &&
      final_eval.grad_norm() > config.tolerance) {
    status = SolveStatus::MaxIters;  // should not happen; stay honest
  }
  return finish_result(std::move(result), status, full, final_eval);
}

template <typename Real>
SolverResult<Real> solve_impl(const DualProblem<Real>& prob,
                              const SolverConfig<Real>& config,
                              std::optional<RealVector<Real>> lambda0) {
  config.validate();
  prob.validate();
  const Index m = prob.multipliers();
  RealVector<Real> lambda;
  if (lambda0) {
    if (lambda0->size() != m) {
      throw ValidationError("solve: lambda0 length mismatch");
    }
    lambda = *lambda0;
  } else {
    lambda = initial_lambda(config, m);
  }
  return config.line_search ? solve_line_search(prob, config, lambda)
                            : solve_fixed_rate(prob, config, std::move(lambda));
}

}  // namespace detail

/// Gradient ascent on the dual: lambda <- lambda + eta grad f(lambda) until
/// ||grad f|| <= tolerance. With line_search enabled the step is chosen by
/// Armijo backtracking, doubling after clean accepts. Starts from zeros
/// unless the config requests a seeded random start.
template <typename Real>
SolverResult<Real> solve(const DualProblem<Real>& prob,
                         const SolverConfig<Real>& config) {
  return detail::solve_impl(prob, config, std::optional<RealVector<Real>>());
}

template <typename Real>
SolverResult<Real> solve(const DualProblem<Real>& prob,
                         const SolverConfig<Real>& config,
                         const RealVector<Real>& lambda0) {
  return detail::solve_impl(prob, config, std::optional<RealVector<Real>>(lambda0));
}

/// build_problem followed by solve from the default start (zeros).
template <typename Real>
SolverResult<Real> beta_bound(const MeasurementRecord<Real>& record,
                              const SolverConfig<Real>& config) {
  return solve(build_problem(record, config), config);
}

/// S(P || p.b) in bits for a positive semidefinite candidate P that need not
/// have unit trace (the primal candidate only reaches trace 1 at optimality).
template <typename Real>
Real relative_entropy_to_reference(const DualProblem<Real>& prob,
                                   const Hermitian<Real>& candidate) {
  const Spectrum<Real> s = eigh(candidate);
  Real tr_p_log_p = Real(0);
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const Real w = s.eigenvalues[i];
    if (w > Real(kEntropyFloor)) {
      tr_p_log_p += w * std::log2(w);
    }
  }
  const RealVector<Real> diag = candidate.matrix().diagonal().real();
  return tr_p_log_p - diag.dot(prob.log_probs);
}

/// |beta - S(rho*||p.b)|; bounded by ||lambda|| ||grad f|| via the Lagrangian
/// identity, so it contracts to zero at convergence.
template <typename Real>
Real duality_gap(const DualProblem<Real>& prob,
                 const SolverResult<Real>& result) {
  return std::abs(result.beta -
                  relative_entropy_to_reference(prob, result.primal_candidate));
}

}  // namespace cohbound
