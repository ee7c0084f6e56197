#pragma once

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cohbound/common.hpp"
#include "cohbound/measurement.hpp"
#include "cohbound/pauli.hpp"
#include "cohbound/random.hpp"
#include "cohbound/states.hpp"

namespace cohbound {

// Digital model of the two-photon polarization experiment: wave-plate Jones
// matrices, attenuator-controlled mixing into Werner states, Poissonian
// coincidence counting, expectation extraction, and linear-inversion
// tomography. |0> is horizontal and |1> vertical polarization.

enum class WavePlateKind { Half, Quarter };

/// Half-wave plate rotated by theta from vertical:
/// [-cos 2t, -sin 2t; -sin 2t, cos 2t]. Involutory with determinant -1.
inline Eigen::Matrix2cd half_wave_plate(double theta) {
  const double c = std::cos(2 * theta);
  const double s = std::sin(2 * theta);
  Eigen::Matrix2cd u;
  u << -c, -s, -s, c;
  return u;
}

/// Quarter-wave plate rotated by zeta from vertical:
/// (1/sqrt2) [1 + i cos 2z, i sin 2z; i sin 2z, 1 - i cos 2z].
inline Eigen::Matrix2cd quarter_wave_plate(double zeta) {
  const double c = std::cos(2 * zeta);
  const double s = std::sin(2 * zeta);
  const std::complex<double> i(0, 1);
  Eigen::Matrix2cd u;
  u << 1.0 + i * c, i * s, i * s, 1.0 - i * c;
  return u / std::sqrt(2.0);
}

struct WavePlate {
  WavePlateKind kind = WavePlateKind::Half;
  double angle = 0.0;  // radians from vertical polarization

  Eigen::Matrix2cd unitary() const {
    return kind == WavePlateKind::Half ? half_wave_plate(angle)
                                       : quarter_wave_plate(angle);
  }
};

/// Transmittances of the four attenuators controlling the mixture weights.
struct AttenuatorBank {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double eta3 = 1.0;
  double eta4 = 1.0;

  void validate() const {
    for (double eta : {eta1, eta2, eta3, eta4}) {
      if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ValidationError("AttenuatorBank: transmittance outside [0, 1]");
      }
    }
  }
};

/// Settings that realize werner(p):
/// eta1 = (1-p)/(2+2p), eta2 = (1+3p)/(2+2p), eta3 = (1-p)/2, eta4 = (1+p)/2.
inline AttenuatorBank transmittances(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("transmittances: p must lie in [0, 1]");
  }
  AttenuatorBank bank;
  bank.eta1 = (1.0 - p) / (2.0 + 2.0 * p);
  bank.eta2 = (1.0 + 3.0 * p) / (2.0 + 2.0 * p);
  bank.eta3 = (1.0 - p) / 2.0;
  bank.eta4 = (1.0 + p) / 2.0;
  return bank;
}

/// Normalized output of the mixing stage: with N = (eta1+eta2)(eta3+eta4),
/// weight eta2 eta4 / N on psi-, eta1 eta4 / N on psi+, and
/// (eta1+eta2) eta3 / 2N on each of HH and VV.
inline DensityMatrix<double> mixed_state(const AttenuatorBank& bank) {
  bank.validate();
  const double norm = (bank.eta1 + bank.eta2) * (bank.eta3 + bank.eta4);
  if (!(norm > 1e-15)) {
    throw ValidationError(
        "mixed_state: attenuator settings give zero throughput");
  }
  const double w_minus = bank.eta2 * bank.eta4 / norm;
  const double w_plus = bank.eta1 * bank.eta4 / norm;
  const double w_pair = (bank.eta1 + bank.eta2) * bank.eta3 / (2.0 * norm);

  const ComplexVector<double> km = bell_minus_ket<double>();
  const ComplexVector<double> kp = bell_plus_ket<double>();
  ComplexMatrix<double> m = w_minus * (km * km.adjoint()) +
                            w_plus * (kp * kp.adjoint());
  m(0, 0) += w_pair;  // |HH><HH|
  m(3, 3) += w_pair;  // |VV><VV|
  return DensityMatrix<double>(
      Hermitian<double>::unchecked(((m + m.adjoint()) / 2.0).eval()));
}

/// Coincidence counts for one measurement setting over the four outcome
/// pairs, ordered |00>, |01>, |10>, |11> in the setting's eigenbasis.
struct CountRecord {
  std::string basis_label;
  std::array<long long, 4> counts = {0, 0, 0, 0};
  long long total = 0;

  void validate() const {
    long long sum = 0;
    for (long long c : counts) {
      if (c < 0) {
        throw ValidationError("CountRecord: negative count");
      }
      sum += c;
    }
    if (sum != total) {
      throw ValidationError("CountRecord: counts do not sum to total");
    }
  }
};

namespace exp_detail {

inline Eigen::Matrix2cd single_qubit_eigenbasis(char pauli) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0, 1);
  Eigen::Matrix2cd u;
  switch (pauli) {
    case 'X':
      u << r, r, r, -r;
      break;
    case 'Y':
      u << r, r, i * r, -i * r;
      break;
    case 'Z':
      u = Eigen::Matrix2cd::Identity();
      break;
    default:
      throw ValidationError(
          std::string("measurement setting may not contain '") + pauli + "'");
  }
  return u;  // columns: +1 then -1 eigenvector
}

inline void check_setting(const PauliString& setting, Index dim) {
  if (setting.qubits() != 2 || dim != 4) {
    throw ValidationError("measurement model covers two-qubit states only");
  }
  if (setting.label().find('I') != std::string::npos) {
    throw ValidationError("measurement setting must avoid identity factors");
  }
}

}  // namespace exp_detail

/// Exact outcome probabilities of a two-qubit setting from {X, Y, Z}^2,
/// ordered by outcome bits (0 = +1 eigenvalue per qubit).
inline Eigen::Vector4d outcome_probabilities(const DensityMatrix<double>& rho,
                                             const PauliString& setting) {
  exp_detail::check_setting(setting, rho.dim());
  const Eigen::Matrix2cd u1 =
      exp_detail::single_qubit_eigenbasis(setting.label()[0]);
  const Eigen::Matrix2cd u2 =
      exp_detail::single_qubit_eigenbasis(setting.label()[1]);
  Eigen::Matrix4cd u;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          u(2 * a + c, 2 * b + d) = u1(a, b) * u2(c, d);
        }
      }
    }
  }
  const Eigen::Vector4cd diag = (u.adjoint() * rho.matrix() * u).diagonal();
  return diag.real().cwiseMax(0.0);
}

/// Draws the four coincidence counts as independent Poisson variables with
/// means shots * probability.
inline CountRecord measure_counts(const DensityMatrix<double>& rho,
                                  const PauliString& setting, long long shots,
                                  std::mt19937_64& rng) {
  if (shots < 1) {
    throw ValidationError("measure_counts: shots must be >= 1");
  }
  const Eigen::Vector4d probs = outcome_probabilities(rho, setting);
  CountRecord out;
  out.basis_label = setting.label();
  out.total = 0;
  for (int k = 0; k < 4; ++k) {
    const double mean = double(shots) * probs[k];
    long long c = 0;
    if (mean > 0) {
      std::poisson_distribution<long long> poisson(mean);
      c = poisson(rng);
    }
    out.counts[static_cast<std::size_t>(k)] = c;
    out.total += c;
  }
  return out;
}

inline CountRecord measure_counts(const DensityMatrix<double>& rho,
                                  const PauliString& setting, long long shots,
                                  std::uint64_t seed) {
  std::mt19937_64 rng = seeded_rng(seed);
  return measure_counts(rho, setting, shots, rng);
}

inline Eigen::Vector4d outcome_frequencies(const CountRecord& record) {
  record.validate();
  if (record.total <= 0) {
    throw ValidationError("outcome_frequencies: record has zero total");
  }
  Eigen::Vector4d f;
  for (int k = 0; k < 4; ++k) {
    f[k] = double(record.counts[static_cast<std::size_t>(k)]) /
           double(record.total);
  }
  return f;
}

/// Signed two-qubit parity estimate: signs (+1, -1, -1, +1) over the
/// outcome pairs.
inline double parity_expectation(const CountRecord& record) {
  const Eigen::Vector4d f = outcome_frequencies(record);
  return f[0] - f[1] - f[2] + f[3];
}

/// Assembles a MeasurementRecord from raw counts. Exactly one record must be
/// the ZZ setting; it supplies the basis probabilities. Every other record
/// contributes its Pauli observable with the parity estimate.
inline MeasurementRecord<double> estimate_expectations(
    const std::vector<CountRecord>& records) {
  const CountRecord* zz = nullptr;
  for (const auto& r : records) {
    if (r.basis_label == "ZZ") {
      if (zz != nullptr) {
        throw ValidationError("estimate_expectations: duplicate ZZ record");
      }
      zz = &r;
    }
  }
  if (zz == nullptr) {
    throw ValidationError(
        "estimate_expectations: a ZZ record is required for basis "
        "probabilities");
  }
  MeasurementRecord<double> out;
  out.dim = 4;
  out.basis_probs = outcome_frequencies(*zz);
  for (const auto& r : records) {
    if (&r == zz) {
      continue;
    }
    out.observables.push_back(pauli_matrix<double>(PauliString(r.basis_label)));
    out.expectations.conservativeResize(out.expectations.size() + 1);
    out.expectations[out.expectations.size() - 1] = parity_expectation(r);
  }
  out.validate();
  return out;
}

/// Noiseless counterpart of estimate_expectations: exact basis probabilities
/// and expectations for the given extra settings.
inline MeasurementRecord<double> exact_record(
    const DensityMatrix<double>& rho,
    const std::vector<PauliString>& extra_settings) {
  std::vector<Hermitian<double>> observables;
  observables.reserve(extra_settings.size());
  for (const auto& s : extra_settings) {
    observables.push_back(pauli_matrix<double>(s));
  }
  return record_from_state(rho, observables);
}

/// Full two-qubit Pauli expectation table <sigma_a x sigma_b> indexed by
/// (a, b) over (I, X, Y, Z); entry (0, 0) is 1.
inline Eigen::Matrix4d exact_pauli_expectations(const DensityMatrix<double>& rho) {
  static constexpr char kAxes[4] = {'I', 'X', 'Y', 'Z'};
  Eigen::Matrix4d t;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Hermitian<double> op = tensor(pauli_matrix<double>(kAxes[a]),
                                          pauli_matrix<double>(kAxes[b]));
      t(a, b) = trace_product(rho.op(), op);
    }
  }
  return t;
}

/// Tomographic expectation table from the nine local settings at finite
/// shots. Single-qubit marginals are averaged over the three settings that
/// contain them.
inline Eigen::Matrix4d sampled_pauli_expectations(
    const DensityMatrix<double>& rho, long long shots, std::mt19937_64& rng) {
  static constexpr char kAxes[3] = {'X', 'Y', 'Z'};
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
  t(0, 0) = 1.0;
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  Eigen::Vector3d second = Eigen::Vector3d::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const std::string label{kAxes[a], kAxes[b]};
      const CountRecord counts = measure_counts(rho, PauliString(label), shots, rng);
      const Eigen::Vector4d f = outcome_frequencies(counts);
      t(a + 1, b + 1) = f[0] - f[1] - f[2] + f[3];
      first[a] += f[0] + f[1] - f[2] - f[3];
      second[b] += f[0] - f[1] + f[2] - f[3];
    }
  }
  for (int a = 0; a < 3; ++a) {
    t(a + 1, 0) = first[a] / 3.0;
    t(0, a + 1) = second[a] / 3.0;
  }
  return t;
}

/// Linear-inversion tomography with positivity repair: reconstructs
/// (1/4) sum t_ab sigma_a x sigma_b, then clips negative eigenvalues and
/// renormalizes.
inline DensityMatrix<double> qst_linear_inversion(
    const Eigen::Matrix4d& pauli_expectations) {
  if (std::abs(pauli_expectations(0, 0) - 1.0) > 1e-12) {
    throw ValidationError(
        "qst_linear_inversion: identity expectation must equal 1");
  }
  static constexpr char kAxes[4] = {'I', 'X', 'Y', 'Z'};
  ComplexMatrix<double> m = ComplexMatrix<double>::Zero(4, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (pauli_expectations(a, b) != 0.0) {
        m += pauli_expectations(a, b) *
             tensor(pauli_matrix<double>(kAxes[a]), pauli_matrix<double>(kAxes[b]))
                 .matrix();
      }
    }
  }
  m /= 4.0;
  return clip_to_density(Hermitian<double>(((m + m.adjoint()) / 2.0).eval()));
}

}  // namespace cohbound
