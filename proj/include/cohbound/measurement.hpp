#pragma once

#include <sstream>
#include <vector>

#include "cohbound/common.hpp"
#include "cohbound/hermitian.hpp"
#include "cohbound/states.hpp"

namespace cohbound {

inline constexpr double kProbSumTol = 1e-9;

/// Measured data: computational-basis probabilities plus expectation values
/// of extra observables. This is the solver's entire view of the state.
template <typename Real = double>
struct MeasurementRecord {
  Index dim = 0;
  RealVector<Real> basis_probs;
  std::vector<Hermitian<Real>> observables;
  RealVector<Real> expectations;

  void validate() const {
    if (dim < 1) {
      throw ValidationError("MeasurementRecord: dim must be >= 1");
    }
    if (basis_probs.size() != dim) {
      throw ValidationError("MeasurementRecord: basis_probs length " +
                            std::to_string(basis_probs.size()) +
                            " does not match dim " + std::to_string(dim));
    }
    for (Index i = 0; i < dim; ++i) {
      if (basis_probs[i] < -Real(1e-12)) {
        std::ostringstream msg;
        msg << "MeasurementRecord: basis_probs[" << i << "] = "
            << basis_probs[i] << " is negative";
        throw ValidationError(msg.str());
      }
    }
    const Real total = basis_probs.sum();
    if (std::abs(total - Real(1)) > Real(kProbSumTol)) {
      std::ostringstream msg;
      msg << "MeasurementRecord: basis_probs sum to " << total
          << ", expected 1 within " << kProbSumTol;
      throw ValidationError(msg.str());
    }
    if (static_cast<Index>(observables.size()) != expectations.size()) {
      throw ValidationError(
          "MeasurementRecord: observables and expectations differ in length");
    }
    for (std::size_t j = 0; j < observables.size(); ++j) {
      if (observables[j].dim() != dim) {
        throw ValidationError("MeasurementRecord: observable " +
                              std::to_string(j) + " has dim " +
                              std::to_string(observables[j].dim()) +
                              ", expected " + std::to_string(dim));
      }
      const Real bound = spectral_norm(observables[j]);
      if (std::abs(expectations[static_cast<Index>(j)]) > bound + Real(1e-9)) {
        std::ostringstream msg;
        msg << "MeasurementRecord: expectation " << j << " = "
            << expectations[static_cast<Index>(j)]
            << " exceeds the spectral norm " << bound
            << " of its observable (no state is compatible)";
        throw ValidationError(msg.str());
      }
    }
  }
};

/// Builds the record an ideal experiment on `rho` would produce; the state
/// itself witnesses feasibility of the result.
template <typename Real>
MeasurementRecord<Real> record_from_state(
    const DensityMatrix<Real>& rho,
    const std::vector<Hermitian<Real>>& observables) {
  MeasurementRecord<Real> rec;
  rec.dim = rho.dim();
  rec.basis_probs = rho.matrix().diagonal().real().cwiseMax(Real(0));
  rec.observables = observables;
  rec.expectations.resize(static_cast<Index>(observables.size()));
  for (std::size_t j = 0; j < observables.size(); ++j) {
    rec.expectations[static_cast<Index>(j)] =
        trace_product(rho.op(), observables[j]);
  }
  rec.validate();
  return rec;
}

}  // namespace cohbound
