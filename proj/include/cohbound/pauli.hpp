#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cohbound/common.hpp"
#include "cohbound/hermitian.hpp"

namespace cohbound {

/// Label over the alphabet {I, X, Y, Z}; one character per qubit.
class PauliString {
 public:
  PauliString(std::string label) : label_(std::move(label)) {
    if (label_.empty()) {
      throw ValidationError("PauliString: empty label");
    }
    for (char c : label_) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw ValidationError(std::string("PauliString: invalid character '") +
                              c + "' in label \"" + label_ + "\"");
      }
    }
  }
  PauliString(const char* label) : PauliString(std::string(label)) {}

  const std::string& label() const { return label_; }
  int qubits() const { return static_cast<int>(label_.size()); }
  Index dim() const { return Index(1) << qubits(); }

  bool is_identity() const {
    return label_.find_first_not_of('I') == std::string::npos;
  }
  /// Diagonal in the computational basis (contains no X or Y).
  bool is_diagonal() const {
    return label_.find_first_of("XY") == std::string::npos;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.label_ == b.label_;
  }

 private:
  std::string label_;
};

template <typename Real = double>
Hermitian<Real> pauli_matrix(char c) {
  using Scalar = std::complex<Real>;
  ComplexMatrix<Real> m(2, 2);
  switch (c) {
    case 'I':
      m << Scalar(1), Scalar(0), Scalar(0), Scalar(1);
      break;
    case 'X':
      m << Scalar(0), Scalar(1), Scalar(1), Scalar(0);
      break;
    case 'Y':
      m << Scalar(0), Scalar(0, -1), Scalar(0, 1), Scalar(0);
      break;
    case 'Z':
      m << Scalar(1), Scalar(0), Scalar(0), Scalar(-1);
      break;
    default:
      throw ValidationError(std::string("pauli_matrix: invalid character '") +
                            c + "'");
  }
  return Hermitian<Real>::unchecked(std::move(m));
}

template <typename Real = double>
Hermitian<Real> pauli_matrix(const PauliString& s) {
  Hermitian<Real> acc = pauli_matrix<Real>(s.label().front());
  for (std::size_t i = 1; i < s.label().size(); ++i) {
    acc = tensor(acc, pauli_matrix<Real>(s.label()[i]));
  }
  return acc;
}

/// All N-qubit labels that contain at least one X or Y, in lexicographic
/// order of the digit expansion (I < X < Y < Z per position).
inline std::vector<std::string> nondiagonal_pauli_labels(int qubits) {
  if (qubits < 1 || qubits > 12) {
    throw ValidationError("nondiagonal_pauli_labels: qubits must be in [1, 12]");
  }
  static constexpr char kAlphabet[4] = {'I', 'X', 'Y', 'Z'};
  const std::size_t total = std::size_t(1) << (2 * qubits);
  std::vector<std::string> out;
  out.reserve(total);
  std::string label(static_cast<std::size_t>(qubits), 'I');
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool diagonal = true;
    for (int q = qubits - 1; q >= 0; --q) {
      const char ch = kAlphabet[c & 3];
      label[static_cast<std::size_t>(q)] = ch;
      diagonal = diagonal && (ch == 'I' || ch == 'Z');
      c >>= 2;
    }
    if (!diagonal) {
      out.push_back(label);
    }
  }
  return out;
}

/// Draws `count` distinct Pauli strings uniformly among the non-identity,
/// non-diagonal labels. Deterministic given the generator state.
inline std::vector<PauliString> random_pauli_strings(int qubits, int count,
                                                     std::mt19937_64& rng) {
  if (count < 0) {
    throw ValidationError("random_pauli_strings: count must be >= 0");
  }
  std::vector<std::string> pool = nondiagonal_pauli_labels(qubits);
  if (static_cast<std::size_t>(count) > pool.size()) {
    throw DomainError("random_pauli_strings: requested " +
                      std::to_string(count) + " strings but only " +
                      std::to_string(pool.size()) +
                      " distinct non-diagonal labels exist");
  }
  // partial Fisher-Yates: the first `count` entries become the sample
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
  }
  std::vector<PauliString> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.emplace_back(pool[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace cohbound
