#pragma once

// Run configuration, result documents and the command implementations shared
// by the command-line tool and the Python module.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nekwave {

struct RunConfig {
  std::string problem = "nekrasov";
  /// Hammerstein f(u) = Σ c_p u^p.
  std::vector<double> polynomial = {0.0, 1.0, 1.0};
  bool finite_depth = false;
  double depth = 1.0;
  double wavelength = 1.0;
  std::size_t modes = 64;
  int mode = 1;
  int order = 5;
  std::size_t spectrum_count = 4;
  double ds = 0.02;
  int max_steps = 200;
  double newton_tol = 1e-11;
  double cluster_tol = 1e-8;
  double singular_tol = 1e-8;
  double orthogonal_tol = 1e-10;
  double denominator_guard = 1e-10;
  std::vector<double> sweep_lambdas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  double branching_radius = 0.5;
  std::vector<double> branching_lambdas = {-0.02, -0.01, 0.01, 0.02};
  std::string out_dir = "nekwave_out";
  bool write_csv = true;
  bool write_json = true;
  /// Added to the log kernel inside the verify battery (fault injection).
  double kernel_perturbation = 0.0;
};

/// Parses a JSON config on top of the defaults. Unknown keys, wrong types and
/// invalid values raise ConfigError.
RunConfig parse_config(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Fully resolved config, every field present.
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string render() const;
};

/// %.17g.
std::string csv_number(double v);
std::string csv_number(long long v);

struct ResultDocument {
  std::string schema;
  int schema_version = 1;
  std::string version;
  std::string command;
  std::string timestamp;
  nlohmann::json config;
  nlohmann::json payload;
  /// Numerical outcome; false maps to exit code 1.
  bool ok = true;
  std::vector<CsvTable> tables;

  /// SHA-256 of the serialized payload.
  std::string payload_digest() const;
  nlohmann::json to_json() const;
  static ResultDocument from_json(const nlohmann::json& j);
};

std::string artifact_version();

ResultDocument cmd_spectrum(const RunConfig& c);
ResultDocument cmd_series(const RunConfig& c);
ResultDocument cmd_branching(const RunConfig& c);
ResultDocument cmd_continue(const RunConfig& c);
ResultDocument cmd_verify(const RunConfig& c);
ResultDocument run_command(const std::string& command, const RunConfig& c);

/// Writes <command>.json and the CSV tables into the output directory.
std::vector<std::string> write_outputs(const ResultDocument& doc, const RunConfig& c);

}  // namespace nekwave
