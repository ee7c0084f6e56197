#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cohbound {

// CLI entry points. Each returns the process exit code:
//   0 success, 1 non-convergence, 2 input error, 3 oracle failure.

struct EstimateOptions {
  std::string problem_path;
  std::optional<double> eta;
  std::optional<double> tol;
  std::optional<long> max_iters;
  std::optional<bool> line_search;
  std::string out_path;  // empty: derived from the input path
};

struct BenchOptions {
  std::vector<int> qubits = {2, 3, 4};
  std::vector<int> lambdas = {1, 2, 3};
  int trials = 100;
  double eta = 0.05;
  double tol = 1e-5;
  std::uint64_t seed = 20250801;
  std::string out_csv = "bench.csv";
  int workers = 0;
};

struct OracleScatterOptions {
  int points = 500;
  int dim = 4;
  int extra = 1;
  std::uint64_t seed = 20250801;
  std::vector<std::string> paulis;  // fixes the observables when non-empty
  int restarts = 32;
  std::string out_csv = "scatter.csv";
  int workers = 0;
};

struct SimulateOptions {
  std::string scenario_path;
  std::string out_csv = "simulate.csv";
  int workers = 0;
};

int cmd_estimate(const EstimateOptions& options, std::ostream& out,
                 std::ostream& err);
int cmd_bench(const BenchOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_oracle_scatter(const OracleScatterOptions& options, std::ostream& out,
                       std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out,
                 std::ostream& err);

}  // namespace cohbound
