#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cohbound/alpha_oracle.hpp"
#include "cohbound/dual_solver.hpp"
#include "cohbound/experiment.hpp"
#include "cohbound/parallel.hpp"
#include "cohbound/random.hpp"

namespace cohbound {

// Reproduction drivers behind the CLI: the iteration-complexity sweep and
// the Werner-state measurement campaign. Both fan work out by index with
// per-index derived seeds, so output is byte-stable for a fixed root seed
// regardless of worker count.

struct BenchConfig {
  std::vector<int> qubits = {2, 3, 4};
  std::vector<int> lambda_counts = {1, 2, 3};
  int trials = 100;
  SolverConfig<double> solver;  // eta 0.05, tol 1e-5 by default
  std::uint64_t seed = 20250801;
  int workers = 0;

  void validate() const {
    if (qubits.empty() || lambda_counts.empty() || trials < 1) {
      throw ValidationError("BenchConfig: empty sweep or trials < 1");
    }
    for (int n : qubits) {
      if (n < 1 || n > 10) {
        throw ValidationError("BenchConfig: qubit counts must lie in [1, 10]");
      }
    }
    for (int m : lambda_counts) {
      if (m < 1) {
        throw ValidationError("BenchConfig: lambda counts must be >= 1");
      }
    }
    solver.validate();
  }
};

struct BenchRow {
  int qubits = 0;
  int lambda_count = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  long iterations = 0;
  double beta = 0.0;
  SolveStatus status = SolveStatus::MaxIters;
};

struct BenchSummaryRow {
  int qubits = 0;
  int lambda_count = 0;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;
  int converged = 0;
  int excluded = 0;
};

/// Iteration counts over random feasible instances for every
/// (qubits, multiplier count) cell of the sweep.
inline std::vector<BenchRow> run_bench(const BenchConfig& config) {
  config.validate();
  const std::size_t cells = config.qubits.size() * config.lambda_counts.size();
  std::vector<BenchRow> rows(cells * static_cast<std::size_t>(config.trials));
  parallel_for(rows.size(), resolve_workers(config.workers), [&](std::size_t i) {
    const std::size_t cell = i / static_cast<std::size_t>(config.trials);
    const int trial = static_cast<int>(i % static_cast<std::size_t>(config.trials));
    BenchRow& row = rows[i];
    row.qubits = config.qubits[cell / config.lambda_counts.size()];
    row.lambda_count =
        config.lambda_counts[cell % config.lambda_counts.size()];
    row.trial = trial;
    row.seed = derive_seed(config.seed, i);
    const auto record = random_instance(Index(1) << row.qubits,
                                        row.lambda_count - 1, row.seed);
    const auto res = beta_bound(record, config.solver);
    row.iterations = res.iterations;
    row.beta = res.beta;
    row.status = res.status;
  });
  return rows;
}

/// Mean and sample standard deviation of T per cell; non-converged trials
/// are excluded from the moments and counted.
inline std::vector<BenchSummaryRow> summarize_bench(
    const BenchConfig& config, const std::vector<BenchRow>& rows) {
  std::vector<BenchSummaryRow> out;
  for (int n : config.qubits) {
    for (int m : config.lambda_counts) {
      BenchSummaryRow s;
      s.qubits = n;
      s.lambda_count = m;
      double total = 0.0;
      std::vector<double> values;
      for (const auto& row : rows) {
        if (row.qubits != n || row.lambda_count != m) {
          continue;
        }
        if (row.status == SolveStatus::Converged) {
          values.push_back(double(row.iterations));
          total += double(row.iterations);
        } else {
          ++s.excluded;
        }
      }
      s.converged = static_cast<int>(values.size());
      if (!values.empty()) {
        s.mean_iterations = total / double(values.size());
        double var = 0.0;
        for (double v : values) {
          var += (v - s.mean_iterations) * (v - s.mean_iterations);
        }
        s.std_iterations =
            values.size() > 1 ? std::sqrt(var / double(values.size() - 1)) : 0.0;
      }
      out.push_back(s);
    }
  }
  return out;
}

/// Werner measurement campaign: which p values to prepare, which observable
/// sets to feed the solver (the basis measurement is always included), and
/// the counting-noise model.
struct Scenario {
  std::vector<double> p_values = {0.0, 0.1, 0.2, 1.0 / 3.0, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::vector<std::string>> observable_sets = {{"XX"}, {"XX", "YY"}};
  long long shots = 100000;
  int repetitions = 1000;
  std::uint64_t seed = 20250801;
  bool poisson = true;  // false: exact expectations, one repetition
  bool qst = true;
  SolverConfig<double> solver;
  int workers = 0;

  void validate() const {
    if (p_values.empty() || observable_sets.empty()) {
      throw ValidationError("Scenario: p_values and observable_sets required");
    }
    for (double p : p_values) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("Scenario: p values must lie in [0, 1]");
      }
    }
    for (const auto& set : observable_sets) {
      if (set.empty()) {
        throw ValidationError("Scenario: empty observable set");
      }
      for (const auto& label : set) {
        const PauliString s(label);
        if (s.qubits() != 2) {
          throw ValidationError("Scenario: observables must be two-qubit");
        }
        if (label.find('I') != std::string::npos) {
          throw ValidationError(
              "Scenario: identity factors are not measurable settings");
        }
      }
    }
    if (shots < 1 || repetitions < 1) {
      throw ValidationError("Scenario: shots and repetitions must be >= 1");
    }
    solver.validate();
  }
};

struct SimulationCell {
  double p = 0.0;
  std::string obs_label;  // e.g. "ZZ+XX+YY"
  double beta_mean = 0.0;
  double beta_std = 0.0;
  double rec_qst_mean = 0.0;
  double rec_qst_std = 0.0;
  double rec_ideal = 0.0;
  double noiseless_beta = 0.0;  // same solver config on exact expectations
  int failed_reps = 0;
  std::vector<double> beta_samples;  // converged repetitions, in rep order
};

namespace detail {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) {
    out.mean = out.std = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  for (double x : v) {
    out.mean += x;
  }
  out.mean /= double(v.size());
  if (v.size() > 1) {
    double var = 0.0;
    for (double x : v) {
      var += (x - out.mean) * (x - out.mean);
    }
    out.std = std::sqrt(var / double(v.size() - 1));
  }
  return out;
}

}  // namespace detail

/// Runs the campaign. Every (p, observable set) cell reports the bound's
/// mean and spread over the repetitions; tomography statistics are shared
/// across the observable sets of the same p.
inline std::vector<SimulationCell> run_scenario(const Scenario& scenario) {
  scenario.validate();
  const int workers = resolve_workers(scenario.workers);
  const std::size_t nsets = scenario.observable_sets.size();
  const int reps = scenario.poisson ? scenario.repetitions : 1;

  // tomography per p value, reused across observable sets
  std::vector<detail::MeanStd> qst_stats(scenario.p_values.size());
  if (scenario.qst) {
    for (std::size_t pi = 0; pi < scenario.p_values.size(); ++pi) {
      const DensityMatrix<double> rho = werner(scenario.p_values[pi]);
      std::vector<double> values(static_cast<std::size_t>(reps));
      const std::uint64_t tag = derive_seed(scenario.seed, 0xA0000 + pi);
      parallel_for(values.size(), workers, [&](std::size_t r) {
        if (!scenario.poisson) {
          values[r] = rec(qst_linear_inversion(exact_pauli_expectations(rho)));
          return;
        }
        std::mt19937_64 rng = seeded_rng(derive_seed(tag, r));
        const auto table =
            sampled_pauli_expectations(rho, scenario.shots, rng);
        values[r] = rec(qst_linear_inversion(table));
      });
      qst_stats[pi] = detail::mean_std(values);
    }
  }

  std::vector<SimulationCell> cells;
  cells.reserve(scenario.p_values.size() * nsets);
  for (std::size_t pi = 0; pi < scenario.p_values.size(); ++pi) {
    const double p = scenario.p_values[pi];
    const DensityMatrix<double> rho = werner(p);
    for (std::size_t si = 0; si < nsets; ++si) {
      const auto& set = scenario.observable_sets[si];
      SimulationCell cell;
      cell.p = p;
      cell.obs_label = "ZZ";
      for (const auto& label : set) {
        cell.obs_label += "+" + label;
      }
      cell.rec_ideal = werner_rec_closed_form(p);

      std::vector<PauliString> settings;
      for (const auto& label : set) {
        settings.emplace_back(label);
      }
      cell.noiseless_beta =
          beta_bound(exact_record(rho, settings), scenario.solver).beta;

      std::vector<double> betas(static_cast<std::size_t>(reps));
      std::vector<char> ok(static_cast<std::size_t>(reps), 1);
      const std::uint64_t tag =
          derive_seed(scenario.seed, 0xB0000 + pi * nsets + si);
      parallel_for(betas.size(), workers, [&](std::size_t r) {
        if (!scenario.poisson) {
          betas[r] = cell.noiseless_beta;
          return;
        }
        std::mt19937_64 rng = seeded_rng(derive_seed(tag, r));
        std::vector<CountRecord> counts;
        counts.push_back(
            measure_counts(rho, PauliString("ZZ"), scenario.shots, rng));
        for (const auto& s : settings) {
          counts.push_back(measure_counts(rho, s, scenario.shots, rng));
        }
        const auto res =
            beta_bound(estimate_expectations(counts), scenario.solver);
        if (res.status == SolveStatus::Converged) {
          betas[r] = res.beta;
        } else {
          ok[r] = 0;
        }
      });
      for (std::size_t r = 0; r < betas.size(); ++r) {
        if (ok[r]) {
          cell.beta_samples.push_back(betas[r]);
        } else {
          ++cell.failed_reps;
        }
      }
      const auto stats = detail::mean_std(cell.beta_samples);
      cell.beta_mean = stats.mean;
      cell.beta_std = stats.std;
      if (scenario.qst) {
        cell.rec_qst_mean = qst_stats[pi].mean;
        cell.rec_qst_std = qst_stats[pi].std;
      } else {
        cell.rec_qst_mean = std::numeric_limits<double>::quiet_NaN();
        cell.rec_qst_std = std::numeric_limits<double>::quiet_NaN();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace cohbound
