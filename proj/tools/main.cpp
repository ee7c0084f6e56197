#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cohbound/commands.hpp"
#include "cohbound/version.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& text, const std::string& name) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? text.npos : comma - pos);
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw CLI::ValidationError(name, "expected a comma-separated integer list");
    }
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified lower bounds on the relative entropy of coherence "
               "from expectation-value data"};
  app.set_version_flag("--version", cohbound::kVersion);
  app.require_subcommand(1);

  // estimate
  cohbound::EstimateOptions est;
  double est_eta = 0.0, est_tol = 0.0;
  long est_max_iters = 0;
  bool est_line_search = false;
  auto* estimate = app.add_subcommand(
      "estimate", "Compute the coherence lower bound for a problem file");
  estimate->add_option("file", est.problem_path, "problem JSON file")
      ->required();
  auto* eta_opt = estimate->add_option("--eta", est_eta, "learning rate");
  auto* tol_opt =
      estimate->add_option("--tol", est_tol, "gradient-norm tolerance");
  auto* iters_opt =
      estimate->add_option("--max-iters", est_max_iters, "iteration budget");
  auto* ls_flag = estimate->add_flag("--line-search", est_line_search,
                                     "use Armijo line search");
  estimate->add_option("--out", est.out_path, "result JSON path");

  // bench
  cohbound::BenchOptions bench;
  std::string bench_qubits = "2,3,4";
  std::string bench_lambdas = "1,2,3";
  auto* bench_cmd = app.add_subcommand(
      "bench", "Iteration-complexity sweep over random instances");
  bench_cmd->add_option("--qubits", bench_qubits, "qubit counts, e.g. 2,3,4");
  bench_cmd->add_option("--lambdas", bench_lambdas,
                        "multiplier counts, e.g. 1,2,3");
  bench_cmd->add_option("--trials", bench.trials, "instances per cell");
  bench_cmd->add_option("--eta", bench.eta, "learning rate");
  bench_cmd->add_option("--tol", bench.tol, "gradient-norm tolerance");
  bench_cmd->add_option("--seed", bench.seed, "root seed");
  bench_cmd->add_option("--out", bench.out_csv, "detail CSV path");
  bench_cmd->add_option("--workers", bench.workers,
                        "worker threads (overrides COHBOUND_WORKERS)");

  // oracle-scatter
  cohbound::OracleScatterOptions scatter;
  auto* scatter_cmd = app.add_subcommand(
      "oracle-scatter",
      "Compare the bound against the direct minimizer on random instances");
  scatter_cmd->add_option("--points", scatter.points, "number of instances");
  scatter_cmd->add_option("--dim", scatter.dim, "Hilbert space dimension");
  scatter_cmd->add_option("--extra", scatter.extra,
                          "random extra observables per instance");
  scatter_cmd->add_option("--seed", scatter.seed, "root seed");
  scatter_cmd->add_option("--pauli", scatter.paulis,
                          "fix the observable set (repeatable), e.g. --pauli XX");
  scatter_cmd->add_option("--restarts", scatter.restarts,
                          "direct-minimizer restarts");
  scatter_cmd->add_option("--out", scatter.out_csv, "CSV path");
  scatter_cmd->add_option("--workers", scatter.workers,
                          "worker threads (overrides COHBOUND_WORKERS)");

  // simulate
  cohbound::SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Run a Werner-state measurement scenario file");
  sim_cmd->add_option("file", simulate.scenario_path, "scenario JSON file")
      ->required();
  sim_cmd->add_option("--out", simulate.out_csv, "CSV path");
  sim_cmd->add_option("--workers", simulate.workers,
                      "worker threads (overrides COHBOUND_WORKERS)");

  CLI11_PARSE(app, argc, argv);

  if (estimate->parsed()) {
    if (eta_opt->count()) est.eta = est_eta;
    if (tol_opt->count()) est.tol = est_tol;
    if (iters_opt->count()) est.max_iters = est_max_iters;
    if (ls_flag->count()) est.line_search = est_line_search;
    return cohbound::cmd_estimate(est, std::cout, std::cerr);
  }
  if (bench_cmd->parsed()) {
    try {
      bench.qubits = parse_int_list(bench_qubits, "--qubits");
      bench.lambdas = parse_int_list(bench_lambdas, "--lambdas");
    } catch (const CLI::Error& e) {
      std::cerr << "input error: " << e.what() << '\n';
      return 2;
    }
    return cohbound::cmd_bench(bench, std::cout, std::cerr);
  }
  if (scatter_cmd->parsed()) {
    return cohbound::cmd_oracle_scatter(scatter, std::cout, std::cerr);
  }
  if (sim_cmd->parsed()) {
    return cohbound::cmd_simulate(simulate, std::cout, std::cerr);
  }
  return 2;
}
