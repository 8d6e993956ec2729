// Command-line front end: tdho <kernel|classical|propagate|validate|compare|suite> [options]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tdho/experiment.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::string profile;
  std::optional<double> mu, t_a, t_b;
  std::string q_a, q_b, path;
  std::optional<int> samples;
  std::optional<double> rtol, atol;
  std::optional<double> h;
  bool strict = false;
  std::optional<double> q_min, q_max;
  std::optional<long> grid_n;
  std::optional<double> center, momentum, sigma;
  std::string method;
  std::optional<double> dt;
  std::optional<int> n_slices;
  std::string out;
};

json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw tdho::ConfigError(where, std::string("invalid JSON: ") + e.what());
  }
}

// "x" or "min,max,n"
json parse_span_flag(const std::string& text, const std::string& where) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  try {
    if (parts.size() == 1) return std::stod(parts[0]);
    if (parts.size() == 3) return {{"min", std::stod(parts[0])}, {"max", std::stod(parts[1])}, {"n", std::stol(parts[2])}};
  } catch (const std::exception&) {
  }
  throw tdho::ConfigError(where, "expected a number or min,max,n");
}

template <class T>
void put(json& doc, const char* section, const char* key, const std::optional<T>& v) {
  if (v) doc[section][key] = *v;
}

json build_document(const Flags& f, const std::string& job) {
  json doc = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw tdho::ConfigError("$", "cannot read config file " + f.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    doc = parse_json_text(buf.str(), "$");
    if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) doc = doc.at("config");
    if (!doc.is_object()) throw tdho::ConfigError("$", "config must be a JSON object");
  }
  if (doc.contains("job") && doc.at("job").is_string() &&
      tdho::job_from_name(doc.at("job").get<std::string>()) != tdho::job_from_name(job))
    throw tdho::ConfigError("$.job", "config job '" + doc.at("job").get<std::string>() +
                                         "' does not match subcommand '" + job + "'");
  doc["job"] = tdho::job_name(tdho::job_from_name(job));

  if (!f.profile.empty()) doc["profile"] = parse_json_text(f.profile, "$.profile");
  if (f.mu) doc["mu"] = *f.mu;
  put(doc, "window", "t_a", f.t_a);
  put(doc, "window", "t_b", f.t_b);
  if (!f.q_a.empty()) doc["kernel"]["q_a"] = parse_span_flag(f.q_a, "$.kernel.q_a");
  if (!f.q_b.empty()) doc["kernel"]["q_b"] = parse_span_flag(f.q_b, "$.kernel.q_b");
  if (!f.path.empty()) doc["kernel"]["path"] = f.path;
  put(doc, "classical", "samples", f.samples);
  put(doc, "classical", "rtol", f.rtol);
  put(doc, "classical", "atol", f.atol);
  put(doc, "validate", "h", f.h);
  if (f.strict) doc["validate"]["strict"] = true;
  put(doc, "grid", "q_min", f.q_min);
  put(doc, "grid", "q_max", f.q_max);
  put(doc, "grid", "n", f.grid_n);
  put(doc, "state", "center", f.center);
  put(doc, "state", "momentum", f.momentum);
  put(doc, "state", "sigma", f.sigma);
  if (!f.method.empty()) doc["propagate"]["method"] = f.method;
  put(doc, "propagate", "dt", f.dt);
  put(doc, "propagate", "n_slices", f.n_slices);
  if (!f.out.empty()) doc["output"]["dir"] = f.out;
  if (const char* env = std::getenv("TDHO_OUT"); env && *env) doc["output"]["dir"] = env;
  return doc;
}

int run_job(const Flags& flags, const std::string& job) {
  const tdho::ExperimentConfig config = tdho::parse_config(build_document(flags, job));
  const tdho::RunResult result = tdho::run(config);
  std::cout << tdho::job_name(config.job) << ": wrote " << result.files.size() << " files to "
            << config.output_dir << " (config " << tdho::config_hash(config) << ")\n";
  for (const auto& w : result.manifest.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
  if (!result.message.empty()) std::cout << result.message << "\n";
  if (result.exit_code == 2) std::cout << "validation FAILED\n";
  return result.exit_code;
}

int run_suite(const std::string& out) {
  std::string root = out.empty() ? "tdho_suite" : out;
  if (const char* env = std::getenv("TDHO_OUT"); env && *env) root = env;
  int files = 0;
  for (const auto& config : tdho::suite_configs(root)) files += static_cast<int>(tdho::run(config).files.size());
  std::cout << "suite: wrote " << files << " files to " << root << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config or manifest file");
  cmd->add_option("--profile", f.profile, "frequency profile as JSON");
  cmd->add_option("--mu", f.mu, "mass");
  cmd->add_option("--t-a", f.t_a, "window start");
  cmd->add_option("--t-b", f.t_b, "window end");
  cmd->add_option("--rtol", f.rtol, "ODE relative tolerance");
  cmd->add_option("--atol", f.atol, "ODE absolute tolerance");
  cmd->add_option("--out", f.out, "output directory (TDHO_OUT overrides)");
}

void add_wave(CLI::App* cmd, Flags& f) {
  cmd->add_option("--q-min", f.q_min, "grid lower edge");
  cmd->add_option("--q-max", f.q_max, "grid upper edge");
  cmd->add_option("--grid-n", f.grid_n, "grid points");
  cmd->add_option("--center", f.center, "Gaussian center");
  cmd->add_option("--momentum", f.momentum, "Gaussian momentum");
  cmd->add_option("--sigma", f.sigma, "Gaussian width");
  cmd->add_option("--dt", f.dt, "Crank-Nicolson time step");
  cmd->add_option("--n-slices", f.n_slices, "time slices for the path-integral oracle");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent harmonic oscillator propagator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(TDHO_VERSION));
  Flags flags;

  auto* kernel = app.add_subcommand("kernel", "kernel values on a (q_a, q_b) grid");
  add_common(kernel, flags);
  kernel->add_option("--q-a", flags.q_a, "q_a value or min,max,n");
  kernel->add_option("--q-b", flags.q_b, "q_b value or min,max,n");
  kernel->add_option("--path", flags.path, "robust or literal")->check(CLI::IsMember({"robust", "literal"}));

  auto* classical = app.add_subcommand("classical", "fundamental pair u, v on the window");
  add_common(classical, flags);
  classical->add_option("--samples", flags.samples, "output sample count");

  auto* propagate = app.add_subcommand("propagate", "propagate a Gaussian wavepacket");
  add_common(propagate, flags);
  add_wave(propagate, flags);
  propagate->add_option("--method", flags.method, "kernel, crank_nicolson or time_sliced")
      ->check(CLI::IsMember({"kernel", "crank_nicolson", "time_sliced"}));

  auto* validate = app.add_subcommand("validate", "residual checks for the profile");
  add_common(validate, flags);
  validate->add_option("--step", flags.h, "finite-difference step");
  validate->add_flag("--strict", flags.strict, "exit 2 when any check fails");

  auto* compare = app.add_subcommand("compare", "kernel vs Crank-Nicolson vs time slicing");
  add_common(compare, flags);
  add_wave(compare, flags);

  std::string suite_out;
  auto* suite = app.add_subcommand("suite", "run every job for the five catalogued profiles");
  suite->add_option("--out", suite_out, "output root (TDHO_OUT overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (suite->parsed()) return run_suite(suite_out);
    for (auto* cmd : {kernel, classical, propagate, validate, compare})
      if (cmd->parsed()) return run_job(flags, cmd->get_name());
  } catch (const tdho::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
