#include <doctest.h>

#include <cmath>
#include <random>

#include "cohbound/hermitian.hpp"
#include "cohbound/pauli.hpp"
#include "cohbound/random.hpp"
#include "cohbound/states.hpp"

using namespace cohbound;

namespace {

Hermitian<double> random_hermitian(Index d, std::mt19937_64& rng) {
  ComplexMatrix<double> g = ginibre<double>(d, d, rng);
  return Hermitian<double>::unchecked(((g + g.adjoint()) / 2.0).eval());
}

}  // namespace

TEST_CASE("eigh on known matrices") {
  SUBCASE("Pauli X") {
    const auto s = eigh(pauli_matrix<double>('X'));
    CHECK(s.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("identity") {
    const auto s = eigh(Hermitian<double>::identity(4));
    for (int i = 0; i < 4; ++i) {
      CHECK(s.eigenvalues[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("already diagonal") {
    ComplexMatrix<double> m = ComplexMatrix<double>::Zero(2, 2);
    m(0, 0) = 0.2;
    m(1, 1) = 0.8;
    const auto s = eigh(Hermitian<double>(m));
    CHECK(s.eigenvalues[0] == doctest::Approx(0.2));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.8));
    // eigenvectors are the standard basis up to phase
    CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0));
  }
}

TEST_CASE("construction rejects non-Hermitian input with diagnostic norm") {
  ComplexMatrix<double> m = ComplexMatrix<double>::Zero(2, 2);
  m(0, 1) = {0.5, 0.0};
  m(1, 0) = {0.5 + 1e-6, 0.0};
  CHECK_THROWS_WITH_AS((Hermitian<double>(m)),
                       doctest::Contains("asymmetry norm"), ValidationError);
}

TEST_CASE("construction symmetrizes sub-tolerance noise") {
  ComplexMatrix<double> m = ComplexMatrix<double>::Zero(2, 2);
  m(0, 1) = {0.5, 1e-14};
  m(1, 0) = {0.5, 1e-14};  // conjugate would be -1e-14
  const Hermitian<double> h(m);
  CHECK(h(0, 1) == std::conj(h(1, 0)));
}

TEST_CASE("eigh reconstruction and orthonormality on random matrices") {
  std::mt19937_64 rng = seeded_rng(11);
  for (Index d : {2, 3, 4, 8, 16}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto h = random_hermitian(d, rng);
      const auto s = eigh(h);
      CHECK((s.reconstruct() - h.matrix()).norm() <= 1e-10);
      const ComplexMatrix<double> gram =
          s.eigenvectors.adjoint() * s.eigenvectors;
      CHECK((gram - ComplexMatrix<double>::Identity(d, d)).norm() <= 1e-10);
      for (Index i = 0; i + 1 < d; ++i) {
        CHECK(s.eigenvalues[i] <= s.eigenvalues[i + 1]);
      }
    }
  }
}

TEST_CASE("matrix_fn") {
  SUBCASE("exp2 of zero matrix is identity") {
    const auto r = exp2m(Hermitian<double>::zero(3));
    CHECK((r.matrix() - ComplexMatrix<double>::Identity(3, 3)).norm() <= 1e-14);
  }
  SUBCASE("log2 of I/2 is -I") {
    const Hermitian<double> h = 0.5 * Hermitian<double>::identity(2);
    const auto r = log2m(h);
    CHECK((r.matrix() + ComplexMatrix<double>::Identity(2, 2)).norm() <= 1e-14);
  }
  SUBCASE("exp2(log2(D)) round trip on positive diagonal") {
    ComplexMatrix<double> m = ComplexMatrix<double>::Zero(2, 2);
    m(0, 0) = 0.3;
    m(1, 1) = 0.7;
    const Hermitian<double> d(m);
    const auto r = exp2m(log2m(d));
    CHECK((r.matrix() - d.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("identity function returns the input") {
    std::mt19937_64 rng = seeded_rng(12);
    const auto h = random_hermitian(5, rng);
    const auto r = matrix_fn(h, [](double x) { return x; });
    CHECK((r.matrix() - h.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("log2 names the offending eigenvalue") {
    ComplexMatrix<double> m = ComplexMatrix<double>::Zero(2, 2);
    m(0, 0) = -0.25;
    m(1, 1) = 1.0;
    CHECK_THROWS_WITH_AS(log2m(Hermitian<double>(m)),
                         doctest::Contains("undefined at eigenvalue"),
                         DomainError);
  }
}

TEST_CASE("tensor products") {
  const auto z = pauli_matrix<double>('Z');
  const auto zz = tensor(z, z);
  ComplexMatrix<double> expect = ComplexMatrix<double>::Zero(4, 4);
  expect(0, 0) = 1;
  expect(1, 1) = -1;
  expect(2, 2) = -1;
  expect(3, 3) = 1;
  CHECK(zz.matrix() == expect);

  const auto i2 = Hermitian<double>::identity(2);
  CHECK(tensor(i2, i2).matrix() == ComplexMatrix<double>::Identity(4, 4));

  // X (x) X flips both bits: |01> -> |10>
  const auto xx = pauli_matrix<double>(PauliString("XX"));
  ComplexVector<double> ket01 = ComplexVector<double>::Zero(4);
  ket01(1) = 1;
  ComplexVector<double> ket10 = ComplexVector<double>::Zero(4);
  ket10(2) = 1;
  CHECK((xx.matrix() * ket01 - ket10).norm() == 0.0);
}

TEST_CASE("tensor associativity on Pauli strings is exact") {
  const auto x = pauli_matrix<double>('X');
  const auto y = pauli_matrix<double>('Y');
  const auto z = pauli_matrix<double>('Z');
  const auto left = tensor(tensor(x, y), z);
  const auto right = tensor(x, tensor(y, z));
  CHECK(left.matrix() == right.matrix());
  CHECK(left.matrix() == pauli_matrix<double>(PauliString("XYZ")).matrix());
}

TEST_CASE("trace_product") {
  const auto i4 = Hermitian<double>::identity(4);
  CHECK(trace_product(i4, 0.25 * i4) == doctest::Approx(1.0).epsilon(1e-14));

  const auto psi_minus = bell_minus<double>();
  CHECK(trace_product(psi_minus.op(), pauli_matrix<double>(PauliString("ZZ"))) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(trace_product(psi_minus.op(), pauli_matrix<double>(PauliString("XX"))) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  SUBCASE("symmetry on random pairs") {
    std::mt19937_64 rng = seeded_rng(13);
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_hermitian(4, rng);
      const auto b = random_hermitian(4, rng);
      CHECK(std::abs(trace_product(a, b) - trace_product(b, a)) <= 1e-12);
    }
  }

  SUBCASE("imaginary residue raises") {
    ComplexMatrix<double> bad = ComplexMatrix<double>::Zero(2, 2);
    bad(0, 1) = {0.0, 1.0};
    bad(1, 0) = {0.0, 1.0};  // not Hermitian; smuggled in via unchecked
    const auto corrupted = Hermitian<double>::unchecked(bad);
    const auto x = pauli_matrix<double>('X');
    CHECK_THROWS_AS(trace_product(corrupted, x), NumericalError);
  }
}

TEST_CASE("spectral_norm is the largest absolute eigenvalue") {
  std::mt19937_64 rng = seeded_rng(14);
  const auto h = random_hermitian(6, rng);
  const auto s = eigh(h);
  CHECK(spectral_norm(h) ==
        doctest::Approx(s.eigenvalues.cwiseAbs().maxCoeff()));
}

TEST_CASE("PauliString validation and realization") {
  CHECK_THROWS_AS(PauliString("XQ"), ValidationError);
  CHECK_THROWS_AS(PauliString(""), ValidationError);
  CHECK(PauliString("IZ").is_diagonal());
  CHECK(!PauliString("IZ").is_identity());
  CHECK(PauliString("II").is_identity());
  CHECK(!PauliString("XZ").is_diagonal());
  CHECK(PauliString("XYZ").dim() == 8);

  SUBCASE("realized strings are Hermitian and involutory") {
    std::mt19937_64 rng = seeded_rng(15);
    const auto strings = random_pauli_strings(3, 10, rng);
    for (const auto& s : strings) {
      const auto p = pauli_matrix<double>(s);
      const ComplexMatrix<double> sq = p.matrix() * p.matrix();
      CHECK((sq - ComplexMatrix<double>::Identity(8, 8)).cwiseAbs().maxCoeff() <=
            1e-15);
    }
  }
}

TEST_CASE("random_pauli_strings draws distinct non-diagonal labels") {
  std::mt19937_64 rng = seeded_rng(16);
  const auto strings = random_pauli_strings(2, 12, rng);
  CHECK(strings.size() == 12);
  for (std::size_t i = 0; i < strings.size(); ++i) {
    CHECK(!strings[i].is_diagonal());
    for (std::size_t j = i + 1; j < strings.size(); ++j) {
      CHECK(!(strings[i] == strings[j]));
    }
  }
  // 2 qubits have exactly 16 - 4 = 12 non-diagonal strings
  CHECK_THROWS_AS(random_pauli_strings(2, 13, rng), DomainError);
}

TEST_CASE("core templates instantiate for long double") {
  const auto x = pauli_matrix<long double>('X');
  const auto s = eigh(x);
  CHECK(std::abs(s.eigenvalues[0] + 1.0L) <= 1e-15L);
  const auto r = exp2m(Hermitian<long double>::zero(2));
  CHECK((r.matrix() - ComplexMatrix<long double>::Identity(2, 2)).norm() <=
        1e-18L);
}
