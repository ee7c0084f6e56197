#include <doctest.h>

#include <cmath>

#include "cohbound/dual_solver.hpp"
#include "cohbound/experiment.hpp"
#include "cohbound/random.hpp"
#include "cohbound/states.hpp"

using namespace cohbound;

TEST_CASE("half-wave plate") {
  SUBCASE("theta = 0") {
    const Eigen::Matrix2cd u = half_wave_plate(0.0);
    CHECK(u(0, 0) == std::complex<double>(-1.0, 0.0));
    CHECK(u(1, 1) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(u(0, 1)) == 0.0);
  }
  SUBCASE("theta = pi/8 maps H to -(H+V)/sqrt2") {
    const Eigen::Matrix2cd u = half_wave_plate(M_PI / 8.0);
    const Eigen::Vector2cd out = u * Eigen::Vector2cd(1.0, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out(0) + r) <= 1e-12);
    CHECK(std::abs(out(1) + r) <= 1e-12);
  }
  SUBCASE("theta = pi/4 swaps H and V up to sign") {
    const Eigen::Matrix2cd u = half_wave_plate(M_PI / 4.0);
    const Eigen::Vector2cd out = u * Eigen::Vector2cd(1.0, 0.0);
    CHECK(std::abs(out(0)) <= 1e-12);
    CHECK(std::abs(out(1) + 1.0) <= 1e-12);
  }
  SUBCASE("unitary, involutory, determinant -1") {
    std::mt19937_64 rng = seeded_rng(81);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::Matrix2cd u = half_wave_plate(uni(rng));
      CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() <= 1e-12);
      CHECK((u * u - Eigen::Matrix2cd::Identity()).norm() <= 1e-12);
      CHECK(std::abs(u.determinant() + 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("quarter-wave plate") {
  SUBCASE("zeta = 0") {
    const Eigen::Matrix2cd u = quarter_wave_plate(0.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u(0, 0) - std::complex<double>(r, r)) <= 1e-15);
    CHECK(std::abs(u(1, 1) - std::complex<double>(r, -r)) <= 1e-15);
    CHECK(std::abs(u(0, 1)) == 0.0);
  }
  SUBCASE("unitarity over random angles") {
    std::mt19937_64 rng = seeded_rng(82);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::Matrix2cd u = quarter_wave_plate(uni(rng));
      CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() <= 1e-12);
    }
  }
  SUBCASE("squared plate at zeta = 0 acts as a half-wave up to global phase") {
    const Eigen::Matrix2cd sq =
        quarter_wave_plate(0.0) * quarter_wave_plate(0.0);
    const std::complex<double> i(0, 1);
    // sq = diag(i, -i) = -i * half_wave_plate(0)
    CHECK((sq - (-i) * half_wave_plate(0.0)).norm() <= 1e-12);
  }
  SUBCASE("fourth power is proportional to the identity") {
    const Eigen::Matrix2cd u = quarter_wave_plate(0.4);
    const Eigen::Matrix2cd u4 = u * u * u * u;
    CHECK(std::abs(u4(0, 1)) <= 1e-12);
    CHECK(std::abs(u4(1, 0)) <= 1e-12);
    CHECK(std::abs(u4(0, 0) - u4(1, 1)) <= 1e-12);
  }
  SUBCASE("WavePlate wrapper dispatches") {
    const WavePlate hwp{WavePlateKind::Half, 0.3};
    const WavePlate qwp{WavePlateKind::Quarter, 0.3};
    CHECK((hwp.unitary() - half_wave_plate(0.3)).norm() == 0.0);
    CHECK((qwp.unitary() - quarter_wave_plate(0.3)).norm() == 0.0);
  }
}

TEST_CASE("transmittances") {
  SUBCASE("endpoints and p = 1/3") {
    const AttenuatorBank p1 = transmittances(1.0);
    CHECK(p1.eta1 == doctest::Approx(0.0));
    CHECK(p1.eta2 == doctest::Approx(1.0));
    CHECK(p1.eta3 == doctest::Approx(0.0));
    CHECK(p1.eta4 == doctest::Approx(1.0));

    const AttenuatorBank p0 = transmittances(0.0);
    CHECK(p0.eta1 == doctest::Approx(0.5));
    CHECK(p0.eta2 == doctest::Approx(0.5));
    CHECK(p0.eta3 == doctest::Approx(0.5));
    CHECK(p0.eta4 == doctest::Approx(0.5));

    const AttenuatorBank pt = transmittances(1.0 / 3.0);
    CHECK(pt.eta1 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pt.eta2 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(pt.eta3 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(pt.eta4 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("eta1 + eta2 = 1 across the range") {
    for (int i = 0; i <= 20; ++i) {
      const AttenuatorBank bank = transmittances(i / 20.0);
      CHECK(bank.eta1 + bank.eta2 == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(transmittances(1.5), DomainError);
}

TEST_CASE("mixed_state") {
  SUBCASE("matches the Werner family across the grid") {
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      const auto produced = mixed_state(transmittances(p));
      CHECK((produced.matrix() - werner(p).matrix()).cwiseAbs().maxCoeff() <=
            1e-12);
    }
  }
  SUBCASE("single surviving component") {
    const auto rho = mixed_state(AttenuatorBank{0.0, 1.0, 0.0, 1.0});
    CHECK((rho.matrix() - bell_minus<double>().matrix()).cwiseAbs().maxCoeff() <=
          1e-14);
  }
  SUBCASE("balanced bank gives the maximally mixed state") {
    const auto rho = mixed_state(AttenuatorBank{0.5, 0.5, 0.5, 0.5});
    CHECK((rho.matrix() - ComplexMatrix<double>::Identity(4, 4) / 4.0)
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }
  CHECK_THROWS_AS(mixed_state(AttenuatorBank{0.0, 0.0, 0.5, 0.5}),
                  ValidationError);
}

TEST_CASE("outcome probabilities") {
  CHECK(outcome_probabilities(bell_minus<double>(), PauliString("ZZ"))
            .isApprox(Eigen::Vector4d(0.0, 0.5, 0.5, 0.0), 1e-12));
  CHECK(outcome_probabilities(bell_minus<double>(), PauliString("XX"))
            .isApprox(Eigen::Vector4d(0.0, 0.5, 0.5, 0.0), 1e-12));
  CHECK(outcome_probabilities(DensityMatrix<double>::maximally_mixed(4),
                              PauliString("XY"))
            .isApprox(Eigen::Vector4d::Constant(0.25), 1e-12));
  CHECK_THROWS_AS(
      outcome_probabilities(bell_minus<double>(), PauliString("IZ")),
      ValidationError);
}

TEST_CASE("measure_counts") {
  SUBCASE("counts sum to total and are reproducible") {
    const auto a =
        measure_counts(werner(0.6), PauliString("XX"), 100000, std::uint64_t(5));
    const auto b =
        measure_counts(werner(0.6), PauliString("XX"), 100000, std::uint64_t(5));
    a.validate();
    CHECK(a.counts == b.counts);
    CHECK(a.total == b.total);
  }
  SUBCASE("frequencies approach the exact probabilities") {
    std::mt19937_64 rng = seeded_rng(83);
    const auto counts =
        measure_counts(werner(0.6), PauliString("XX"), 2'000'000, rng);
    const Eigen::Vector4d f = outcome_frequencies(counts);
    const Eigen::Vector4d exact =
        outcome_probabilities(werner(0.6), PauliString("XX"));
    CHECK((f - exact).cwiseAbs().maxCoeff() <= 2e-3);
    CHECK(parity_expectation(counts) == doctest::Approx(-0.6).epsilon(5e-3));
  }
  SUBCASE("pure-state setting with exact zeros stays exact") {
    std::mt19937_64 rng = seeded_rng(84);
    const auto counts =
        measure_counts(bell_minus<double>(), PauliString("XX"), 1'000'000, rng);
    CHECK(counts.counts[0] == 0);
    CHECK(counts.counts[3] == 0);
    CHECK(parity_expectation(counts) == -1.0);
  }
}

TEST_CASE("estimate_expectations") {
  SUBCASE("parity arithmetic on clean ZZ counts") {
    CountRecord zz;
    zz.basis_label = "ZZ";
    zz.counts = {0, 500, 500, 0};
    zz.total = 1000;
    const auto rec = estimate_expectations({zz});
    CHECK(rec.basis_probs[0] == 0.0);
    CHECK(rec.basis_probs[1] == doctest::Approx(0.5));
    CHECK(rec.basis_probs[2] == doctest::Approx(0.5));
    CHECK(rec.basis_probs[3] == 0.0);
    CHECK(parity_expectation(zz) == doctest::Approx(-1.0));
    CHECK(rec.observables.empty());
  }
  SUBCASE("uniform counts give zero expectation") {
    CountRecord xx;
    xx.basis_label = "XX";
    xx.counts = {250, 250, 250, 250};
    xx.total = 1000;
    CHECK(parity_expectation(xx) == 0.0);
  }
  SUBCASE("full assembly") {
    std::mt19937_64 rng = seeded_rng(85);
    const auto rho = werner(0.6);
    const std::vector<CountRecord> counts = {
        measure_counts(rho, PauliString("ZZ"), 1'000'000, rng),
        measure_counts(rho, PauliString("XX"), 1'000'000, rng),
        measure_counts(rho, PauliString("YY"), 1'000'000, rng)};
    const auto rec = estimate_expectations(counts);
    CHECK(rec.observables.size() == 2);
    CHECK(rec.expectations[0] == doctest::Approx(-0.6).epsilon(5e-3));
    CHECK(rec.expectations[1] == doctest::Approx(-0.6).epsilon(5e-3));
    CHECK(rec.basis_probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("missing or zero-total records are rejected") {
    CountRecord xx;
    xx.basis_label = "XX";
    xx.counts = {1, 0, 0, 0};
    xx.total = 1;
    CHECK_THROWS_WITH_AS(estimate_expectations({xx}),
                         doctest::Contains("ZZ record"), ValidationError);
    CountRecord zz;
    zz.basis_label = "ZZ";
    zz.counts = {0, 0, 0, 0};
    zz.total = 0;
    CHECK_THROWS_WITH_AS(estimate_expectations({zz}),
                         doctest::Contains("zero total"), ValidationError);
  }
}

TEST_CASE("tomography") {
  SUBCASE("exact expectations invert exactly") {
    const auto rho = werner(0.6);
    const auto reconstructed =
        qst_linear_inversion(exact_pauli_expectations(rho));
    CHECK((reconstructed.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <=
          1e-12);

    const auto bell = bell_minus<double>();
    CHECK(fidelity(qst_linear_inversion(exact_pauli_expectations(bell)), bell) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("noisy tomography at 1e6 shots stays close") {
    const auto rho = werner(1.0 / 3.0);
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng = seeded_rng(8600 + seed);
      const auto t = sampled_pauli_expectations(rho, 1'000'000, rng);
      const auto est = qst_linear_inversion(t);
      worst = std::min(worst, fidelity(est, rho));
    }
    CHECK(worst >= 0.999);
  }
  SUBCASE("identity entry is mandatory") {
    Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
    t(0, 0) = 0.9;
    CHECK_THROWS_AS(qst_linear_inversion(t), ValidationError);
  }
}

TEST_CASE("simulated records feed the solver end to end") {
  const SolverConfig<double> solver;
  for (double p : {0.4, 0.8}) {
    const auto rho = werner(p);
    const auto noiseless =
        beta_bound(exact_record(rho, {PauliString("XX")}), solver);
    REQUIRE(noiseless.status == SolveStatus::Converged);

    std::vector<double> betas;
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
      std::mt19937_64 rng = seeded_rng(derive_seed(87, rep));
      const std::vector<CountRecord> counts = {
          measure_counts(rho, PauliString("ZZ"), 100000, rng),
          measure_counts(rho, PauliString("XX"), 100000, rng)};
      const auto res = beta_bound(estimate_expectations(counts), solver);
      REQUIRE(res.status == SolveStatus::Converged);
      betas.push_back(res.beta);
    }
    double mean = 0.0;
    for (double b : betas) mean += b;
    mean /= double(betas.size());
    double var = 0.0;
    for (double b : betas) var += (b - mean) * (b - mean);
    const double sd = std::sqrt(var / double(betas.size() - 1));
    CHECK(std::abs(noiseless.beta - mean) <= 4.0 * sd);
  }
}
