#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdho/evolve.hpp"
#include "tdho/kernel.hpp"

namespace tdho {

enum class Job { KernelGrid, SolveF, Propagate, Validate, OracleCompare };

std::string job_name(Job job);
/// Accepts the config names (kernel-grid, ...) and the subcommand names (kernel, ...).
Job job_from_name(const std::string& name, const std::string& path = "$.job");

/// Evenly spaced points; a single point when n == 1.
struct Span {
  double min = 0.0;
  double max = 0.0;
  int n = 1;

  std::vector<double> values() const;
};

/// One experiment. Every field has a default except the profile.
struct ExperimentConfig {
  Job job = Job::KernelGrid;
  FrequencyProfile profile = FrequencyProfile::free();
  double mu = 1.0;
  double t_a = 0.0;
  double t_b = 1.0;

  // kernel-grid
  Span q_a{-1.0, 1.0, 5};
  Span q_b{-1.0, 1.0, 5};
  KernelPath path = KernelPath::Robust;

  // solve-f
  int samples = 101;
  SolveOptions solve{1e-10, 1e-10};

  // validate
  double h = 1e-3;
  bool strict = false;

  // propagate / oracle-compare
  Grid grid;
  GaussianState state{0.0, 0.0, 0.7071067811865476};
  std::string method = "kernel";  // kernel | crank_nicolson | time_sliced
  double dt = 1e-3;
  int n_slices = 256;

  std::string output_dir = "tdho_out";
};

/// Parses and validates a config document; errors carry the JSON path of the
/// offending field. A manifest written by run() is accepted as well.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Canonical form with every default filled in; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct RunResult {
  int exit_code = 0;  // 0 success, 2 validation failure
  nlohmann::json manifest;
  std::vector<std::filesystem::path> files;
  std::string message;
};

/// Runs one job and writes its CSV/JSON outputs plus manifest.json into
/// config.output_dir. Numeric errors propagate as tdho::Error.
RunResult run(const ExperimentConfig& config);

/// The five catalogued profiles used by the acceptance suite.
std::vector<std::pair<std::string, FrequencyProfile>> suite_profiles();

/// One config per (profile, job) pair, each writing to its own subdirectory of `root`.
std::vector<ExperimentConfig> suite_configs(const std::filesystem::path& root);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// printf("%.17g"); round-trips every double.
std::string format_double(double x);

}  // namespace tdho
