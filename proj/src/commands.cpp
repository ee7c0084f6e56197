#include "cohbound/commands.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cohbound/alpha_oracle.hpp"
#include "cohbound/drivers.hpp"
#include "cohbound/dual_solver.hpp"
#include "cohbound/io.hpp"

namespace cohbound {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInputError = 2;
constexpr int kExitOracleFailure = 3;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string default_out_path(const std::string& input) {
  const std::size_t slash = input.find_last_of('/');
  std::string name = slash == std::string::npos ? input : input.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) {
    name = name.substr(0, dot);
  }
  return name + ".result.json";
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s << (i ? "," : "") << v[i];
  }
  return s.str();
}

std::string summary_path_for(const std::string& csv) {
  const std::size_t dot = csv.find_last_of('.');
  if (dot == std::string::npos || csv.find('/', dot) != std::string::npos) {
    return csv + "_summary.csv";
  }
  return csv.substr(0, dot) + "_summary" + csv.substr(dot);
}

}  // namespace

int cmd_estimate(const EstimateOptions& options, std::ostream& out,
                 std::ostream& err) {
  ProblemFile problem;
  try {
    problem = load_problem(options.problem_path);
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (options.eta) {
    problem.solver.learning_rate = *options.eta;
  }
  if (options.tol) {
    problem.solver.tolerance = *options.tol;
  }
  if (options.max_iters) {
    problem.solver.max_iters = *options.max_iters;
  }
  if (options.line_search) {
    problem.solver.line_search = *options.line_search;
  }

  try {
    problem.solver.validate();
    const DualProblem<double> prob =
        build_problem(problem.record, problem.solver);
    const SolverResult<double> result = solve(prob, problem.solver);
    const std::string report =
        solver_result_json(prob, result, problem.solver);
    out << report << '\n';
    const std::string out_path = options.out_path.empty()
                                     ? default_out_path(options.problem_path)
                                     : options.out_path;
    std::ofstream file(out_path);
    if (!file) {
      err << "input error: cannot write " << out_path << '\n';
      return kExitInputError;
    }
    file << report << '\n';
    if (result.status != SolveStatus::Converged) {
      err << "solver did not converge: status " << to_string(result.status)
          << " after " << result.iterations << " iterations (grad norm "
          << result.grad_norm << ")\n";
      return kExitNotConverged;
    }
  } catch (const ValidationError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_bench(const BenchOptions& options, std::ostream& out,
              std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  BenchConfig config;
  config.qubits = options.qubits;
  config.lambda_counts = options.lambdas;
  config.trials = options.trials;
  config.solver.learning_rate = options.eta;
  config.solver.tolerance = options.tol;
  config.seed = options.seed;
  config.workers = options.workers;

  std::vector<BenchRow> rows;
  try {
    config.validate();
    rows = run_bench(config);
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }

  const std::string summary_path = summary_path_for(options.out_csv);
  CsvWriter detail(options.out_csv,
                   {"N", "lambda_count", "trial", "seed", "T", "beta", "status"});
  for (const auto& row : rows) {
    detail.row({CsvWriter::cell(row.qubits), CsvWriter::cell(row.lambda_count),
                CsvWriter::cell(row.trial), CsvWriter::cell(row.seed),
                CsvWriter::cell(static_cast<long long>(row.iterations)),
                CsvWriter::cell(row.beta), to_string(row.status)});
  }
  detail.close();

  const auto summary = summarize_bench(config, rows);
  CsvWriter sum(summary_path, {"N", "lambda_count", "mean_T", "std_T"});
  int excluded_total = 0;
  for (const auto& s : summary) {
    sum.row({CsvWriter::cell(s.qubits), CsvWriter::cell(s.lambda_count),
             CsvWriter::cell(s.mean_iterations),
             CsvWriter::cell(s.std_iterations)});
    excluded_total += s.excluded;
  }
  sum.close();

  std::ostringstream cfg;
  cfg << "{\"qubits\":[" << join_ints(options.qubits) << "],\"lambdas\":["
      << join_ints(options.lambdas) << "],\"trials\":" << options.trials
      << ",\"seed\":" << options.seed
      << ",\"solver\":" << solver_config_json(config.solver) << "}";
  const double wall = seconds_since(start);
  const std::vector<std::string> outputs = {options.out_csv, summary_path};
  write_manifest(options.out_csv, "bench", cfg.str(), options.seed, wall,
                 outputs);
  write_manifest(summary_path, "bench", cfg.str(), options.seed, wall,
                 outputs);

  out << "bench: " << rows.size() << " trials over " << summary.size()
      << " cells, " << excluded_total << " non-converged (excluded from means), "
      << wall << " s\n";
  for (const auto& s : summary) {
    out << "  N=" << s.qubits << " |lambda|=" << s.lambda_count
        << " mean_T=" << s.mean_iterations << " std_T=" << s.std_iterations
        << " excluded=" << s.excluded << '\n';
  }
  return kExitOk;
}

int cmd_oracle_scatter(const OracleScatterOptions& options, std::ostream& out,
                       std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ScatterConfig config;
  config.n_points = options.points;
  config.dim = options.dim;
  config.n_extra = options.extra;
  config.seed = options.seed;
  config.oracle.restarts = options.restarts;
  config.workers = options.workers;
  std::vector<ScatterPoint> points;
  try {
    for (const auto& label : options.paulis) {
      config.fixed_observables.emplace_back(label);
    }
    points = scatter_alpha_beta(config);
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }

  CsvWriter csv(options.out_csv, {"seed", "alpha", "beta", "gap"});
  for (const auto& p : points) {
    if (!p.oracle_ok) {
      continue;
    }
    csv.row({CsvWriter::cell(p.instance_seed), CsvWriter::cell(p.alpha),
             CsvWriter::cell(p.beta), CsvWriter::cell(p.gap())});
  }
  csv.close();

  const auto summary = summarize_scatter(points);
  std::ostringstream cfg;
  cfg << "{\"points\":" << options.points << ",\"dim\":" << options.dim
      << ",\"extra\":" << options.extra << ",\"seed\":" << options.seed
      << ",\"restarts\":" << options.restarts << ",\"paulis\":[";
  for (std::size_t i = 0; i < options.paulis.size(); ++i) {
    cfg << (i ? "," : "") << '"' << options.paulis[i] << '"';
  }
  cfg << "]}";
  write_manifest(options.out_csv, "oracle-scatter", cfg.str(), options.seed,
                 seconds_since(start), {options.out_csv});

  out << "oracle-scatter: " << summary.points << " instances, "
      << summary.oracle_failures << " oracle failures, " << summary.violations
      << " ordering violations, mean gap " << summary.mean_gap << ", max gap "
      << summary.max_gap << '\n';
  for (const auto& p : points) {
    if (!p.oracle_ok) {
      err << "oracle failure on instance seed " << p.instance_seed
          << " (excluded from CSV)\n";
    }
  }
  if (summary.oracle_failures > 0) {
    return kExitOracleFailure;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out,
                 std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Scenario scenario;
  std::vector<SimulationCell> cells;
  try {
    scenario = load_scenario(options.scenario_path);
    scenario.workers = options.workers;
    cells = run_scenario(scenario);
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }

  CsvWriter csv(options.out_csv,
                {"p", "obs_set", "beta_mean", "beta_std", "rec_qst_mean",
                 "rec_qst_std", "rec_ideal"});
  int failed = 0;
  for (const auto& c : cells) {
    csv.row({CsvWriter::cell(c.p), c.obs_label, CsvWriter::cell(c.beta_mean),
             CsvWriter::cell(c.beta_std), CsvWriter::cell(c.rec_qst_mean),
             CsvWriter::cell(c.rec_qst_std), CsvWriter::cell(c.rec_ideal)});
    failed += c.failed_reps;
  }
  csv.close();

  std::ostringstream cfg;
  cfg << "{\"scenario\":\"" << options.scenario_path
      << "\",\"shots\":" << scenario.shots
      << ",\"repetitions\":" << scenario.repetitions
      << ",\"noise\":\"" << (scenario.poisson ? "poisson" : "none")
      << "\",\"qst\":" << (scenario.qst ? "true" : "false")
      << ",\"seed\":" << scenario.seed
      << ",\"solver\":" << solver_config_json(scenario.solver) << "}";
  write_manifest(options.out_csv, "simulate", cfg.str(), scenario.seed,
                 seconds_since(start), {options.out_csv});

  out << "simulate: " << cells.size() << " cells, "
      << (scenario.poisson ? scenario.repetitions : 1)
      << " repetitions each, " << failed << " non-converged repetitions, "
      << seconds_since(start) << " s\n";
  if (failed > 0) {
    err << "warning: " << failed
        << " repetitions did not converge and were excluded\n";
  }
  return kExitOk;
}

}  // namespace cohbound
