#include "cohbound/io.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "cohbound/pauli.hpp"
#include "cohbound/version.hpp"

namespace cohbound {

namespace {

using nlohmann::json;

// maps a byte offset from a json parse error to line:column
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_file(const std::string& path, std::string* text_out) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text_out != nullptr) {
    *text_out = text;
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": JSON parse error at " +
                          locate(text, e.byte) + ": " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(ctx + ": missing required field '" + key + "'");
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) {
    throw ValidationError(ctx + ": expected a number");
  }
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) {
    throw ValidationError(ctx + ": expected an integer");
  }
  return j.get<long long>();
}

void apply_solver_overrides(const json& j, const std::string& ctx,
                            SolverConfig<double>& config) {
  if (!j.is_object()) {
    throw ValidationError(ctx + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    const std::string field = ctx + "." + key;
    if (key == "learning_rate") {
      config.learning_rate = as_number(value, field);
    } else if (key == "tolerance") {
      config.tolerance = as_number(value, field);
    } else if (key == "max_iters") {
      config.max_iters = as_integer(value, field);
    } else if (key == "prob_floor") {
      config.prob_floor = as_number(value, field);
    } else if (key == "divergence_bound") {
      config.divergence_bound = as_number(value, field);
    } else if (key == "line_search") {
      if (!value.is_boolean()) {
        throw ValidationError(field + ": expected a boolean");
      }
      config.line_search = value.get<bool>();
    } else if (key == "random_init_seed") {
      if (value.is_null()) {
        config.random_init_seed.reset();
      } else {
        config.random_init_seed =
            static_cast<std::uint64_t>(as_integer(value, field));
      }
    } else {
      throw ValidationError(field + ": unknown solver option");
    }
  }
  config.validate();
}

Hermitian<double> parse_observable(const json& j, Index dim,
                                   const std::string& ctx,
                                   std::string* label_out) {
  if (!j.is_object()) {
    throw ValidationError(ctx + ": expected an object with 'pauli' or 'matrix'");
  }
  if (j.contains("pauli")) {
    const auto& p = j.at("pauli");
    if (!p.is_string()) {
      throw ValidationError(ctx + ".pauli: expected a string");
    }
    const PauliString s(p.get<std::string>());
    if (s.dim() != dim) {
      throw ValidationError(ctx + ".pauli: label '" + s.label() +
                            "' has dimension " + std::to_string(s.dim()) +
                            ", expected " + std::to_string(dim));
    }
    *label_out = s.label();
    return pauli_matrix<double>(s);
  }
  if (j.contains("matrix")) {
    const auto& m = j.at("matrix");
    if (!m.is_array() || m.size() != static_cast<std::size_t>(dim * dim)) {
      throw ValidationError(ctx + ".matrix: expected " +
                            std::to_string(dim * dim) +
                            " [re, im] pairs in row-major order");
    }
    ComplexMatrix<double> mat(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      for (Index k = 0; k < dim; ++k) {
        const auto& entry = m.at(static_cast<std::size_t>(i * dim + k));
        const std::string ectx =
            ctx + ".matrix[" + std::to_string(i * dim + k) + "]";
        if (!entry.is_array() || entry.size() != 2) {
          throw ValidationError(ectx + ": expected a [re, im] pair");
        }
        mat(i, k) = {as_number(entry.at(0), ectx + "[0]"),
                     as_number(entry.at(1), ectx + "[1]")};
      }
    }
    *label_out = "matrix";
    try {
      return Hermitian<double>(std::move(mat));
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + ".matrix: " + e.what());
    }
  }
  throw ValidationError(ctx + ": needs either 'pauli' or 'matrix'");
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", &tm);
  return buf;
}

}  // namespace

ProblemFile load_problem(const std::string& path) {
  const json j = parse_file(path, nullptr);
  const std::string ctx = path;

  ProblemFile out;
  const long long dim = as_integer(require(j, "dimension", ctx), ctx + ".dimension");
  if (dim < 1 || dim > 4096) {
    throw ValidationError(ctx + ".dimension: must lie in [1, 4096]");
  }
  out.record.dim = static_cast<Index>(dim);

  const auto& probs = require(j, "basis_probs", ctx);
  if (!probs.is_array() || probs.size() != static_cast<std::size_t>(dim)) {
    throw ValidationError(ctx + ".basis_probs: expected " +
                          std::to_string(dim) + " entries");
  }
  out.record.basis_probs.resize(dim);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out.record.basis_probs[static_cast<Index>(i)] = as_number(
        probs.at(i), ctx + ".basis_probs[" + std::to_string(i) + "]");
  }

  const auto& observables = require(j, "observables", ctx);
  if (!observables.is_array()) {
    throw ValidationError(ctx + ".observables: expected an array");
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    std::string label;
    out.record.observables.push_back(
        parse_observable(observables.at(i), out.record.dim,
                         ctx + ".observables[" + std::to_string(i) + "]",
                         &label));
    if (label == "matrix") {
      label += "[" + std::to_string(i) + "]";
    }
    out.observable_labels.push_back(label);
  }

  const auto& expectations = require(j, "expectations", ctx);
  if (!expectations.is_array() ||
      expectations.size() != observables.size()) {
    throw ValidationError(ctx +
                          ".expectations: length must match observables");
  }
  out.record.expectations.resize(static_cast<Index>(expectations.size()));
  for (std::size_t i = 0; i < expectations.size(); ++i) {
    out.record.expectations[static_cast<Index>(i)] = as_number(
        expectations.at(i), ctx + ".expectations[" + std::to_string(i) + "]");
  }

  if (j.contains("solver")) {
    apply_solver_overrides(j.at("solver"), ctx + ".solver", out.solver);
  }
  try {
    out.record.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  return out;
}

Scenario load_scenario(const std::string& path) {
  const json j = parse_file(path, nullptr);
  const std::string ctx = path;
  Scenario scenario;

  const auto& ps = require(j, "p_values", ctx);
  if (!ps.is_array() || ps.empty()) {
    throw ValidationError(ctx + ".p_values: expected a non-empty array");
  }
  scenario.p_values.clear();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    scenario.p_values.push_back(
        as_number(ps.at(i), ctx + ".p_values[" + std::to_string(i) + "]"));
  }

  const auto& sets = require(j, "observable_sets", ctx);
  if (!sets.is_array() || sets.empty()) {
    throw ValidationError(ctx + ".observable_sets: expected a non-empty array");
  }
  scenario.observable_sets.clear();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& set = sets.at(i);
    const std::string sctx = ctx + ".observable_sets[" + std::to_string(i) + "]";
    if (!set.is_array() || set.empty()) {
      throw ValidationError(sctx + ": expected a non-empty array of labels");
    }
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto& label = set.at(k);
      if (!label.is_string()) {
        throw ValidationError(sctx + "[" + std::to_string(k) +
                              "]: expected a Pauli label string");
      }
      labels.push_back(label.get<std::string>());
    }
    scenario.observable_sets.push_back(std::move(labels));
  }

  if (j.contains("shots")) {
    scenario.shots = as_integer(j.at("shots"), ctx + ".shots");
  }
  if (j.contains("repetitions")) {
    scenario.repetitions =
        static_cast<int>(as_integer(j.at("repetitions"), ctx + ".repetitions"));
  }
  if (j.contains("seed")) {
    scenario.seed =
        static_cast<std::uint64_t>(as_integer(j.at("seed"), ctx + ".seed"));
  }
  if (j.contains("noise")) {
    const auto& noise = j.at("noise");
    if (!noise.is_string() ||
        (noise.get<std::string>() != "poisson" &&
         noise.get<std::string>() != "none")) {
      throw ValidationError(ctx + ".noise: expected \"poisson\" or \"none\"");
    }
    scenario.poisson = noise.get<std::string>() == "poisson";
  }
  if (j.contains("qst")) {
    if (!j.at("qst").is_boolean()) {
      throw ValidationError(ctx + ".qst: expected a boolean");
    }
    scenario.qst = j.at("qst").get<bool>();
  }
  if (j.contains("solver")) {
    apply_solver_overrides(j.at("solver"), ctx + ".solver", scenario.solver);
  }
  try {
    scenario.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  return scenario;
}

std::string solver_config_json(const SolverConfig<double>& config) {
  json j;
  j["learning_rate"] = config.learning_rate;
  j["tolerance"] = config.tolerance;
  j["max_iters"] = config.max_iters;
  j["prob_floor"] = config.prob_floor;
  j["divergence_bound"] = config.divergence_bound;
  j["line_search"] = config.line_search;
  if (config.random_init_seed) {
    j["random_init_seed"] = *config.random_init_seed;
  } else {
    j["random_init_seed"] = nullptr;
  }
  return j.dump();
}

std::string solver_result_json(const DualProblem<double>& prob,
                               const SolverResult<double>& result,
                               const SolverConfig<double>& config) {
  json j;
  j["beta"] = result.beta;
  j["lambda_star"] = std::vector<double>(
      result.multipliers.data(),
      result.multipliers.data() + result.multipliers.size());
  j["iterations"] = result.iterations;
  j["evaluations"] = result.evaluations;
  j["grad_norm"] = result.grad_norm;
  j["status"] = to_string(result.status);

  const RealVector<double> residuals =
      constraint_residuals(prob, result.primal_candidate);
  std::vector<double> obs_res;
  for (Index i = 0; i + 1 < residuals.size(); ++i) {
    obs_res.push_back(residuals[i]);
  }
  j["primal_constraint_residuals"] = {
      {"observables", obs_res},
      {"trace", residuals[residuals.size() - 1]}};
  j["config"] = json::parse(solver_config_json(config));
  return j.dump(2);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) {
    throw ValidationError(path + ": cannot open for writing");
  }
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw NumericalError(path_ + ": row width mismatch");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  out_.close();
}

std::string CsvWriter::cell(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string CsvWriter::cell(long long value) {
  return std::to_string(value);
}

std::string CsvWriter::cell(std::uint64_t value) {
  return std::to_string(value);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void write_manifest(const std::string& csv_path, const std::string& command,
                    const std::string& config_json, std::uint64_t seed,
                    double wall_seconds,
                    const std::vector<std::string>& outputs) {
  json j;
  j["command"] = command;
  j["config"] = json::parse(config_json);
  char hash[24];
  std::snprintf(hash, sizeof hash, "fnv1a:%016" PRIx64, fnv1a(config_json));
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["versions"] = {{"cohbound", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", std::string("gcc ") + __VERSION__}};
  j["written_at_utc"] = iso8601_now();
  j["wall_clock_seconds"] = wall_seconds;
  j["outputs"] = outputs;

  const std::string path = csv_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) {
    throw ValidationError(path + ": cannot open for writing");
  }
  out << j.dump(2) << '\n';
}

}  // namespace cohbound
