#pragma once

#include <cstdint>
#include <random>

#include "cohbound/common.hpp"

namespace cohbound {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic per-task seed from a root seed and a task index.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Matrix of independent standard complex Gaussians (re and im each N(0,1)).
template <typename Real = double>
ComplexMatrix<Real> ginibre(Index rows, Index cols, std::mt19937_64& rng) {
  if (rows < 1 || cols < 1) {
    throw ValidationError("ginibre: dimensions must be positive");
  }
  std::normal_distribution<Real> gauss(Real(0), Real(1));
  ComplexMatrix<Real> g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const Real re = gauss(rng);
      const Real im = gauss(rng);
      g(i, j) = std::complex<Real>(re, im);
    }
  }
  return g;
}

}  // namespace cohbound
