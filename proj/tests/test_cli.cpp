#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cohbound/commands.hpp"
#include "cohbound/io.hpp"
#include "cohbound/parallel.hpp"

using namespace cohbound;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() /
                   ("cohbound_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& content) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << content;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr const char* kUniformQubit = R"({
  "dimension": 2,
  "basis_probs": [0.5, 0.5],
  "observables": [],
  "expectations": []
})";

}  // namespace

TEST_CASE("load_problem accepts pauli and matrix observables equally") {
  TempDir dir;
  const std::string pauli_path = write_file(dir, "pauli.json", R"({
    "dimension": 4,
    "basis_probs": [0.25, 0.25, 0.25, 0.25],
    "observables": [{"pauli": "XX"}],
    "expectations": [0.0]
  })");
  // XX as explicit row-major [re, im] pairs
  const std::string matrix_path = write_file(dir, "matrix.json", R"({
    "dimension": 4,
    "basis_probs": [0.25, 0.25, 0.25, 0.25],
    "observables": [{"matrix": [
      [0,0],[0,0],[0,0],[1,0],
      [0,0],[0,0],[1,0],[0,0],
      [0,0],[1,0],[0,0],[0,0],
      [1,0],[0,0],[0,0],[0,0]]}],
    "expectations": [0.0]
  })");
  const ProblemFile a = load_problem(pauli_path);
  const ProblemFile b = load_problem(matrix_path);
  CHECK(a.record.observables[0].matrix() == b.record.observables[0].matrix());
  CHECK(a.observable_labels[0] == "XX");
  CHECK(b.observable_labels[0] == "matrix[0]");
}

TEST_CASE("problem file errors carry location context") {
  TempDir dir;
  SUBCASE("malformed JSON names the line") {
    const std::string path =
        write_file(dir, "broken.json", "{\n  \"dimension\": 2,\n  oops\n}");
    CHECK_THROWS_WITH_AS(load_problem(path), doctest::Contains("line 3"),
                         ValidationError);
  }
  SUBCASE("missing field is addressed by name") {
    const std::string path = write_file(dir, "missing.json",
                                        R"({"dimension": 2})");
    CHECK_THROWS_WITH_AS(load_problem(path),
                         doctest::Contains("basis_probs"), ValidationError);
  }
  SUBCASE("wrong entry type is addressed by index") {
    const std::string path = write_file(dir, "badtype.json", R"({
      "dimension": 2,
      "basis_probs": [0.5, "x"],
      "observables": [],
      "expectations": []
    })");
    CHECK_THROWS_WITH_AS(load_problem(path),
                         doctest::Contains("basis_probs[1]"), ValidationError);
  }
  SUBCASE("unknown solver option is rejected") {
    const std::string path = write_file(dir, "badsolver.json", R"({
      "dimension": 2,
      "basis_probs": [0.5, 0.5],
      "observables": [],
      "expectations": [],
      "solver": {"momentum": 0.9}
    })");
    CHECK_THROWS_WITH_AS(load_problem(path), doctest::Contains("momentum"),
                         ValidationError);
  }
}

TEST_CASE("cmd_estimate") {
  TempDir dir;
  std::ostringstream out, err;

  SUBCASE("uniform qubit converges with exit 0") {
    EstimateOptions opt;
    opt.problem_path = write_file(dir, "uniform.json", kUniformQubit);
    opt.tol = 1e-7;
    opt.out_path = dir.file("result.json");
    CHECK(cmd_estimate(opt, out, err) == 0);
    const auto j = nlohmann::json::parse(slurp(opt.out_path));
    CHECK(std::abs(j["beta"].get<double>()) <= 1e-6);
    CHECK(j["status"] == "converged");
    CHECK(std::abs(j["lambda_star"][0].get<double>() + 1.4426950408889634) <=
          1e-6);
  }

  SUBCASE("malformed file exits 2") {
    EstimateOptions opt;
    opt.problem_path = write_file(dir, "broken.json", "{nope");
    CHECK(cmd_estimate(opt, out, err) == 2);
    CHECK(err.str().find("input error") != std::string::npos);
    CHECK(err.str().find("line") != std::string::npos);
  }

  SUBCASE("impossible expectation exits 2") {
    EstimateOptions opt;
    opt.problem_path = write_file(dir, "infeasible.json", R"({
      "dimension": 4,
      "basis_probs": [0.25, 0.25, 0.25, 0.25],
      "observables": [{"pauli": "XX"}],
      "expectations": [1.5]
    })");
    CHECK(cmd_estimate(opt, out, err) == 2);
    CHECK(err.str().find("spectral norm") != std::string::npos);
  }

  SUBCASE("contradictory data exits 1 with diverged status") {
    EstimateOptions opt;
    opt.problem_path = write_file(dir, "contradictory.json", R"({
      "dimension": 4,
      "basis_probs": [0.25, 0.25, 0.25, 0.25],
      "observables": [{"pauli": "XX"}, {"pauli": "XX"}],
      "expectations": [0.5, -0.5],
      "solver": {"divergence_bound": 50.0}
    })");
    opt.out_path = dir.file("contradictory.result.json");
    CHECK(cmd_estimate(opt, out, err) == 1);
    CHECK(err.str().find("diverged") != std::string::npos);
  }
}

TEST_CASE("cmd_bench is deterministic and writes manifests") {
  TempDir dir;
  std::ostringstream out, err;
  BenchOptions opt;
  opt.qubits = {2};
  opt.lambdas = {1, 2};
  opt.trials = 3;
  opt.seed = 99;
  opt.workers = 2;
  opt.out_csv = dir.file("bench.csv");
  REQUIRE(cmd_bench(opt, out, err) == 0);

  const std::string first = slurp(opt.out_csv);
  const std::string first_summary = slurp(dir.file("bench_summary.csv"));
  CHECK(first.rfind("N,lambda_count,trial,seed,T,beta,status\n", 0) == 0);
  CHECK(fs::exists(dir.file("bench.csv.manifest.json")));
  CHECK(fs::exists(dir.file("bench_summary.csv.manifest.json")));

  const auto manifest =
      nlohmann::json::parse(slurp(dir.file("bench.csv.manifest.json")));
  CHECK(manifest["seed"] == 99);
  CHECK(manifest["command"] == "bench");
  CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a:", 0) == 0);
  CHECK(manifest["outputs"].size() == 2);

  // a rerun with one worker produces byte-identical CSVs
  opt.workers = 1;
  REQUIRE(cmd_bench(opt, out, err) == 0);
  CHECK(slurp(opt.out_csv) == first);
  CHECK(slurp(dir.file("bench_summary.csv")) == first_summary);
}

TEST_CASE("cmd_oracle_scatter reports ordered pairs") {
  TempDir dir;
  std::ostringstream out, err;
  OracleScatterOptions opt;
  opt.points = 6;
  opt.dim = 4;
  opt.extra = 1;
  opt.seed = 5;
  opt.restarts = 6;
  opt.paulis = {"XX"};
  opt.workers = 2;
  opt.out_csv = dir.file("scatter.csv");
  REQUIRE(cmd_oracle_scatter(opt, out, err) == 0);

  std::ifstream csv(opt.out_csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "seed,alpha,beta,gap");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto last_comma = line.find_last_of(',');
    const double gap = std::stod(line.substr(last_comma + 1));
    CHECK(gap >= -1e-4);
    ++rows;
  }
  CHECK(rows == 6);
  CHECK(out.str().find("0 ordering violations") != std::string::npos);

  const std::string first = slurp(opt.out_csv);
  REQUIRE(cmd_oracle_scatter(opt, out, err) == 0);
  CHECK(slurp(opt.out_csv) == first);
}

TEST_CASE("cmd_simulate on a noiseless scenario") {
  TempDir dir;
  std::ostringstream out, err;
  const std::string scenario = write_file(dir, "scenario.json", R"({
    "p_values": [0.0, 0.6],
    "observable_sets": [["XX"], ["XX", "YY"]],
    "shots": 1000,
    "repetitions": 4,
    "seed": 11,
    "noise": "none",
    "qst": true,
    "solver": {"line_search": true, "tolerance": 1e-8}
  })");
  SimulateOptions opt;
  opt.scenario_path = scenario;
  opt.out_csv = dir.file("sim.csv");
  opt.workers = 2;
  REQUIRE(cmd_simulate(opt, out, err) == 0);

  std::ifstream csv(opt.out_csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "p,obs_set,beta_mean,beta_std,rec_qst_mean,rec_qst_std,rec_ideal");
  struct Row {
    double p;
    std::string label;
    double beta, beta_std, qst_mean, qst_std, ideal;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(csv, line)) {
    Row r;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    r.p = std::stod(tok);
    std::getline(ss, r.label, ',');
    std::getline(ss, tok, ',');
    r.beta = std::stod(tok);
    std::getline(ss, tok, ',');
    r.beta_std = std::stod(tok);
    std::getline(ss, tok, ',');
    r.qst_mean = std::stod(tok);
    std::getline(ss, tok, ',');
    r.qst_std = std::stod(tok);
    std::getline(ss, tok, ',');
    r.ideal = std::stod(tok);
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 4);
  // p = 0 rows are all ~0
  CHECK(std::abs(rows[0].beta) <= 1e-4);
  CHECK(std::abs(rows[0].qst_mean) <= 1e-4);
  CHECK(rows[0].beta_std == 0.0);
  // noiseless tomography reproduces the ideal coherence
  for (const auto& r : rows) {
    CHECK(r.qst_mean == doctest::Approx(r.ideal).epsilon(1e-9));
    CHECK(r.beta <= r.ideal + 1e-4);
  }
  // the richer observable set tightens the bound
  CHECK(rows[3].beta >= rows[2].beta - 1e-6);
  CHECK(rows[3].label == "ZZ+XX+YY");
}

TEST_CASE("csv cells carry 17 significant digits") {
  const double value = 0.1234567890123456789;
  const std::string cell = CsvWriter::cell(value);
  CHECK(std::stod(cell) == value);
  CHECK(CsvWriter::cell(1.0) == "1");
  CHECK(CsvWriter::cell((long long)42) == "42");
}

TEST_CASE("worker resolution prefers the flag over the environment") {
  ::setenv("COHBOUND_WORKERS", "3", 1);
  CHECK(resolve_workers(5) == 5);
  CHECK(resolve_workers(0) == 3);
  ::unsetenv("COHBOUND_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("fnv1a matches the reference offset basis") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") != fnv1a("b"));
}
