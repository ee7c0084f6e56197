#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cohbound/drivers.hpp"
#include "cohbound/dual_solver.hpp"
#include "cohbound/measurement.hpp"

namespace cohbound {

/// A measurement record plus solver overrides, as read from a problem file.
struct ProblemFile {
  MeasurementRecord<double> record;
  SolverConfig<double> solver;
  std::vector<std::string> observable_labels;  // "XX" or "matrix[j]"
};

/// Parses a problem file. Throws ValidationError with a line- or
/// field-addressed message on malformed input.
ProblemFile load_problem(const std::string& path);

/// Parses a scenario file for the simulate command.
Scenario load_scenario(const std::string& path);

/// Serialized solver configuration (also embedded in manifests).
std::string solver_config_json(const SolverConfig<double>& config);

/// Result report for the estimate command.
std::string solver_result_json(const DualProblem<double>& prob,
                               const SolverResult<double>& result,
                               const SolverConfig<double>& config);

/// CSV writer with a fixed column schema; floating-point cells carry
/// 17 significant digits so equal runs are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  void close();
  const std::string& path() const { return path_; }

  static std::string cell(double value);
  static std::string cell(long long value);
  static std::string cell(int value) { return cell(static_cast<long long>(value)); }
  static std::string cell(std::uint64_t value);

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// 64-bit FNV-1a, used to fingerprint effective configurations.
std::uint64_t fnv1a(const std::string& text);

/// Writes `<csv_path>.manifest.json` describing the run that produced the
/// CSV: command line, effective config and its hash, root seed, versions,
/// timing, and the produced paths.
void write_manifest(const std::string& csv_path, const std::string& command,
                    const std::string& config_json, std::uint64_t seed,
                    double wall_seconds,
                    const std::vector<std::string>& outputs);

}  // namespace cohbound
