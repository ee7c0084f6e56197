#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cohbound/common.hpp"
#include "cohbound/dual_solver.hpp"
#include "cohbound/measurement.hpp"
#include "cohbound/parallel.hpp"
#include "cohbound/pauli.hpp"
#include "cohbound/random.hpp"
#include "cohbound/states.hpp"

namespace cohbound {

// Desk-scale direct minimizers used to audit the dual solver. States are
// parameterized as rho = L L† / tr(L L†) with L a complex d x d factor;
// constraints enter as quadratic penalties escalated over a schedule, and
// the search restarts from several seeded factors. alpha_direct minimizes
// the coherence subject to all constraints (the tight bound); beta_direct
// minimizes the relaxed objective subject only to the extra observables,
// giving an independent primal route to the dual solver's bound.

inline constexpr Index kOracleMaxDim = 8;

struct OracleConfig {
  int restarts = 32;
  std::vector<double> penalty_schedule = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
  double inner_tol = 1e-7;
  int max_inner_iters = 600;  // per penalty stage
  double residual_tol = 1e-5;

  void validate() const {
    if (restarts < 1) {
      throw ValidationError("OracleConfig: restarts must be >= 1");
    }
    if (penalty_schedule.empty()) {
      throw ValidationError("OracleConfig: empty penalty schedule");
    }
    double prev = 0.0;
    for (double w : penalty_schedule) {
      if (!(w > prev)) {
        throw ValidationError(
            "OracleConfig: penalty schedule must be strictly increasing and "
            "positive");
      }
      prev = w;
    }
    if (!(inner_tol > 0) || max_inner_iters < 1 || !(residual_tol > 0)) {
      throw ValidationError("OracleConfig: tolerances must be positive");
    }
  }
};

namespace oracle_detail {

using Eigen::MatrixXd;

struct PenalizedProblem {
  Index dim = 0;
  // diagonal targets; penalized only in tight (alpha) mode
  RealVector<double> probs;
  // floored, renormalized reference probabilities for the relaxed objective
  RealVector<double> ref_probs;
  std::vector<Hermitian<double>> observables;
  RealVector<double> targets;
  bool relaxed = false;
};

struct FactorEval {
  double objective = 0.0;   // base + w * sum of squared residuals
  double base = 0.0;        // coherence (+ diagonal divergence when relaxed)
  double max_residual = 0.0;
};

inline ComplexMatrix<double> assemble(const MatrixXd& re, const MatrixXd& im) {
  return re.cast<std::complex<double>>() +
         std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

inline double floored_log2(double x) {
  return std::log2(std::max(x, kEntropyFloor));
}

/// Value and (optionally) gradient of the penalized objective at factor
/// L = re + i im. The gradient is with respect to the real and imaginary
/// parts; it is audited against finite differences in the test suite.
inline FactorEval penalized_eval(const PenalizedProblem& prob, double weight,
                                 const MatrixXd& re, const MatrixXd& im,
                                 MatrixXd* grad_re, MatrixXd* grad_im) {
  const Index d = prob.dim;
  const ComplexMatrix<double> L = assemble(re, im);
  const double t = L.squaredNorm();
  ComplexMatrix<double> rho = (L * L.adjoint()) / t;
  rho = ((rho + rho.adjoint()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(rho);
  const RealVector<double>& eigs = es.eigenvalues();
  const RealVector<double> diag = rho.diagonal().real();

  // coherence: diagonal entropy minus spectral entropy
  double base = 0.0;
  for (Index i = 0; i < d; ++i) {
    base += eigs[i] * floored_log2(eigs[i]);
    base -= diag[i] * floored_log2(diag[i]);
  }
  if (prob.relaxed) {
    for (Index i = 0; i < d; ++i) {
      base += diag[i] * (floored_log2(diag[i]) - std::log2(prob.ref_probs[i]));
    }
  }

  // residuals
  RealVector<double> diag_res;
  if (!prob.relaxed) {
    diag_res = diag - prob.probs;
  }
  RealVector<double> obs_res(static_cast<Index>(prob.observables.size()));
  for (std::size_t j = 0; j < prob.observables.size(); ++j) {
    const auto& o = prob.observables[j].matrix();
    obs_res[static_cast<Index>(j)] =
        (rho.array() * o.array().conjugate()).sum().real() -
        prob.targets[static_cast<Index>(j)];
  }

  FactorEval out;
  out.base = base;
  double penalty = obs_res.squaredNorm();
  out.max_residual = obs_res.size() ? obs_res.cwiseAbs().maxCoeff() : 0.0;
  if (!prob.relaxed) {
    penalty += diag_res.squaredNorm();
    out.max_residual =
        std::max(out.max_residual, diag_res.cwiseAbs().maxCoeff());
  }
  out.objective = base + weight * penalty;

  if (grad_re == nullptr) {
    return out;
  }

  // matrix gradient with respect to rho
  ComplexMatrix<double> log_rho = ComplexMatrix<double>::Zero(d, d);
  {
    RealVector<double> logw(d);
    for (Index i = 0; i < d; ++i) {
      logw[i] = floored_log2(eigs[i]);
    }
    log_rho = es.eigenvectors() * logw.asDiagonal() *
              es.eigenvectors().adjoint();
  }
  ComplexMatrix<double> g = log_rho;
  for (Index i = 0; i < d; ++i) {
    g(i, i) -= floored_log2(diag[i]);
  }
  if (prob.relaxed) {
    constexpr double log2e = std::numbers::log2e;
    for (Index i = 0; i < d; ++i) {
      g(i, i) += floored_log2(diag[i]) - std::log2(prob.ref_probs[i]) + log2e;
    }
  } else {
    for (Index i = 0; i < d; ++i) {
      g(i, i) += 2.0 * weight * diag_res[i];
    }
  }
  for (std::size_t j = 0; j < prob.observables.size(); ++j) {
    g.noalias() += 2.0 * weight * obs_res[static_cast<Index>(j)] *
                   prob.observables[j].matrix();
  }
  g = ((g + g.adjoint()) / 2.0).eval();

  // chain rule through rho = L L† / t
  const double s = (g.array() * rho.array().conjugate()).sum().real();
  const ComplexMatrix<double> k =
      ((g - s * ComplexMatrix<double>::Identity(d, d)) * L) / t;
  *grad_re = 2.0 * k.real();
  *grad_im = 2.0 * k.imag();
  return out;
}

/// Penalty-escalated descent from one starting factor. Armijo backtracking
/// with step-doubling keeps each stage monotone.
inline FactorEval minimize_from(const PenalizedProblem& prob,
                                const OracleConfig& config, MatrixXd& re,
                                MatrixXd& im) {
  FactorEval last;
  for (double weight : config.penalty_schedule) {
    double step = 0.1;
    const double stage_tol = config.inner_tol * (1.0 + 1e-3 * weight);
    MatrixXd grad_re, grad_im;
    FactorEval eval = penalized_eval(prob, weight, re, im, &grad_re, &grad_im);
    for (int iter = 0; iter < config.max_inner_iters; ++iter) {
      const double gnorm2 = grad_re.squaredNorm() + grad_im.squaredNorm();
      if (std::sqrt(gnorm2) <= stage_tol) {
        break;
      }
      bool accepted = false;
      while (!accepted) {
        const MatrixXd trial_re = re - step * grad_re;
        const MatrixXd trial_im = im - step * grad_im;
        const FactorEval trial =
            penalized_eval(prob, weight, trial_re, trial_im, nullptr, nullptr);
        if (trial.objective <= eval.objective - 1e-4 * step * gnorm2) {
          re = trial_re;
          im = trial_im;
          eval = penalized_eval(prob, weight, re, im, &grad_re, &grad_im);
          step = std::min(step * 2.0, 1e3);
          accepted = true;
        } else {
          step /= 2.0;
          if (step < 1e-16) {
            break;  // flat to machine precision
          }
        }
      }
      if (!accepted) {
        break;
      }
    }
    last = penalized_eval(prob, weight, re, im, nullptr, nullptr);
  }
  return last;
}

inline PenalizedProblem tight_problem(const MeasurementRecord<double>& record) {
  PenalizedProblem prob;
  prob.dim = record.dim;
  prob.probs = record.basis_probs;
  prob.observables = record.observables;
  prob.targets = record.expectations;
  prob.relaxed = false;
  return prob;
}

inline PenalizedProblem relaxed_problem(const MeasurementRecord<double>& record,
                                        double prob_floor) {
  PenalizedProblem prob;
  prob.dim = record.dim;
  prob.ref_probs = record.basis_probs.cwiseMax(prob_floor);
  prob.ref_probs /= prob.ref_probs.sum();
  prob.observables = record.observables;
  prob.targets = record.expectations;
  prob.relaxed = true;
  return prob;
}

/// Multi-start driver. Returns the smallest base value among runs whose
/// residuals meet residual_tol; throws OracleFailure if none do.
inline double multistart_minimum(const PenalizedProblem& prob,
                                 const MeasurementRecord<double>& record,
                                 const OracleConfig& config,
                                 std::uint64_t seed) {
  const Index d = prob.dim;
  double best = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  int feasible_runs = 0;
  for (int r = 0; r < config.restarts; ++r) {
    MatrixXd re(d, d), im(d, d);
    if (r == 0) {
      // diagonal start matching the measured probabilities
      re = MatrixXd::Zero(d, d);
      im = MatrixXd::Zero(d, d);
      for (Index i = 0; i < d; ++i) {
        re(i, i) = std::sqrt(std::max(record.basis_probs[i], 0.0));
      }
    } else {
      std::mt19937_64 rng = seeded_rng(derive_seed(seed, std::uint64_t(r)));
      const ComplexMatrix<double> g = ginibre<double>(d, d, rng);
      re = g.real();
      im = g.imag();
    }
    const FactorEval eval = minimize_from(prob, config, re, im);
    best_residual = std::min(best_residual, eval.max_residual);
    if (eval.max_residual <= config.residual_tol) {
      ++feasible_runs;
      // report the plain coherence of the final state, not the penalized value
      const ComplexMatrix<double> L = assemble(re, im);
      ComplexMatrix<double> rho = L * L.adjoint();
      rho /= rho.trace().real();
      rho = ((rho + rho.adjoint()) / 2.0).eval();
      const DensityMatrix<double> state{
          Hermitian<double>::unchecked(std::move(rho))};
      double value = rec(state);
      if (prob.relaxed) {
        const RealVector<double> diag = state.matrix().diagonal().real();
        for (Index i = 0; i < d; ++i) {
          if (diag[i] > kEntropyFloor) {
            value += diag[i] * (std::log2(diag[i]) - std::log2(prob.ref_probs[i]));
          }
        }
      }
      best = std::min(best, value);
    }
  }
  if (feasible_runs == 0) {
    std::ostringstream msg;
    msg << "oracle failed: no restart reached residuals <= "
        << config.residual_tol << " (best " << best_residual << ") after "
        << config.restarts << " restarts over " << config.penalty_schedule.size()
        << " penalty stages";
    throw OracleFailure(msg.str());
  }
  return best;
}

}  // namespace oracle_detail

/// Tight bound via direct minimization of the coherence over all states
/// compatible with the record. Desk-scale only (dim <= 8).
inline double alpha_direct(const MeasurementRecord<double>& record,
                           const OracleConfig& config,
                           std::uint64_t seed = 0x0A1FA0u) {
  record.validate();
  config.validate();
  if (record.dim > kOracleMaxDim) {
    throw ValidationError("alpha_direct: dim exceeds the desk-scale guard");
  }
  return oracle_detail::multistart_minimum(
      oracle_detail::tight_problem(record), record, config, seed);
}

/// Independent primal route to the relaxed bound: minimizes coherence plus
/// the diagonal divergence to the reference, subject only to the extra
/// observables. Cross-checks the dual solver.
inline double beta_direct(const MeasurementRecord<double>& record,
                          const OracleConfig& config,
                          std::uint64_t seed = 0x0BE7A0u,
                          double prob_floor = 1e-12) {
  record.validate();
  config.validate();
  if (record.dim > kOracleMaxDim) {
    throw ValidationError("beta_direct: dim exceeds the desk-scale guard");
  }
  return oracle_detail::multistart_minimum(
      oracle_detail::relaxed_problem(record, prob_floor), record, config, seed);
}

/// Feasible-by-construction random instance: a full-rank random state
/// measured in the basis plus n_extra distinct non-diagonal Pauli strings.
inline MeasurementRecord<double> random_instance(Index dim, int n_extra,
                                                 std::uint64_t seed) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw DomainError("random_instance: dim must be a power of two >= 2");
  }
  if (n_extra < 0) {
    throw ValidationError("random_instance: n_extra must be >= 0");
  }
  int qubits = 0;
  while ((Index(1) << qubits) < dim) {
    ++qubits;
  }
  std::mt19937_64 rng = seeded_rng(seed);
  const DensityMatrix<double> rho = random_density<double>(dim, dim, rng);
  std::vector<Hermitian<double>> observables;
  for (const auto& s : random_pauli_strings(qubits, n_extra, rng)) {
    observables.push_back(pauli_matrix<double>(s));
  }
  return record_from_state(rho, observables);
}

struct ScatterPoint {
  std::uint64_t instance_seed = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  bool oracle_ok = false;
  bool beta_converged = false;

  double gap() const { return alpha - beta; }
};

struct ScatterSummary {
  int points = 0;
  int oracle_failures = 0;
  int violations = 0;  // alpha < beta - 1e-4 among successful points
  double mean_gap = 0.0;
  double max_gap = 0.0;
  double min_gap = 0.0;
};

struct ScatterConfig {
  int n_points = 500;
  Index dim = 4;
  int n_extra = 1;
  std::uint64_t seed = 1;
  // when non-empty these observables replace the random draw on every
  // instance (n_extra is ignored)
  std::vector<PauliString> fixed_observables;
  OracleConfig oracle;
  SolverConfig<double> solver;
  int workers = 0;
};

/// Generates n_points instances and solves each with both routes. Instances
/// fan out across a worker pool; results land in per-index slots, so the
/// output is deterministic for a fixed seed.
inline std::vector<ScatterPoint> scatter_alpha_beta(const ScatterConfig& cfg) {
  if (cfg.n_points < 1) {
    throw ValidationError("scatter_alpha_beta: n_points must be >= 1");
  }
  if (cfg.dim > kOracleMaxDim) {
    throw ValidationError("scatter_alpha_beta: dim exceeds the desk-scale guard");
  }
  cfg.oracle.validate();
  cfg.solver.validate();

  std::vector<ScatterPoint> points(static_cast<std::size_t>(cfg.n_points));
  parallel_for(points.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
    ScatterPoint& pt = points[i];
    pt.instance_seed = derive_seed(cfg.seed, i);
    MeasurementRecord<double> record;
    if (cfg.fixed_observables.empty()) {
      record = random_instance(cfg.dim, cfg.n_extra, pt.instance_seed);
    } else {
      std::mt19937_64 rng = seeded_rng(pt.instance_seed);
      const DensityMatrix<double> rho =
          random_density<double>(cfg.dim, cfg.dim, rng);
      std::vector<Hermitian<double>> obs;
      for (const auto& s : cfg.fixed_observables) {
        obs.push_back(pauli_matrix<double>(s));
      }
      record = record_from_state(rho, obs);
    }
    const SolverResult<double> res = beta_bound(record, cfg.solver);
    pt.beta = res.beta;
    pt.beta_converged = res.status == SolveStatus::Converged;
    try {
      pt.alpha = alpha_direct(record, cfg.oracle, pt.instance_seed);
      pt.oracle_ok = true;
    } catch (const OracleFailure&) {
      pt.oracle_ok = false;
    }
  });
  return points;
}

inline ScatterSummary summarize_scatter(const std::vector<ScatterPoint>& pts) {
  ScatterSummary s;
  s.points = static_cast<int>(pts.size());
  double total = 0.0;
  int ok = 0;
  s.max_gap = -std::numeric_limits<double>::infinity();
  s.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (!p.oracle_ok) {
      ++s.oracle_failures;
      continue;
    }
    ++ok;
    const double g = p.gap();
    total += g;
    s.max_gap = std::max(s.max_gap, g);
    s.min_gap = std::min(s.min_gap, g);
    if (g < -1e-4) {
      ++s.violations;
    }
  }
  s.mean_gap = ok > 0 ? total / ok : 0.0;
  if (ok == 0) {
    s.max_gap = s.min_gap = 0.0;
  }
  return s;
}

}  // namespace cohbound
