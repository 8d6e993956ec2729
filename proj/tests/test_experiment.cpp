#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdho/errors.hpp"
#include "tdho/experiment.hpp"

using namespace tdho;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tdho_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path;
  }
  return "";
}

const json kMinimal = {{"profile", {{"type", "constant"}, {"omega0", 1.0}}}};

}  // namespace

TEST_CASE("a minimal config fills every default") {
  const ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.job == Job::KernelGrid);
  CHECK(c.mu == 1.0);
  CHECK(c.t_a == 0.0);
  CHECK(c.t_b == 1.0);
  CHECK(c.q_a.values() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(c.grid == Grid());
  CHECK(c.method == "kernel");
  const json canonical = to_json(c);
  CHECK(to_json(parse_config(canonical)) == canonical);
  CHECK(canonical.at("version") == 1);
}

TEST_CASE("config errors name the offending field") {
  CHECK(error_path(json::object()) == "$.profile");
  CHECK(error_path(json::array()) == "$");
  json j = kMinimal;
  j["mu"] = -1.0;
  CHECK(error_path(j) == "$.mu");
  j = kMinimal;
  j["colour"] = "blue";
  CHECK(error_path(j) == "$.colour");
  j = kMinimal;
  j["window"] = {{"t_a", 1.0}, {"t_b", 0.5}};
  CHECK(error_path(j) == "$.window.t_b");
  j = kMinimal;
  j["kernel"] = {{"path", "shortcut"}};
  CHECK(error_path(j) == "$.kernel.path");
  j = kMinimal;
  j["kernel"] = {{"q_a", {{"min", 0.0}, {"max", 1.0}, {"n", 0}}}};
  CHECK(error_path(j) == "$.kernel.q_a.n");
  j = kMinimal;
  j["grid"] = {{"n", 8}};
  CHECK(error_path(j) == "$.grid.n");
  j = kMinimal;
  j["propagate"] = {{"method", "magic"}};
  CHECK(error_path(j) == "$.propagate.method");
  j = kMinimal;
  j["validate"] = {{"strict", "yes"}};
  CHECK(error_path(j) == "$.validate.strict");
  j = kMinimal;
  j["job"] = "dance";
  CHECK(error_path(j) == "$.job");
  j = {{"profile", {{"type", "exp_decay"}, {"omega0", 1.0}}}};
  CHECK(error_path(j) == "$.profile.alpha");
}

TEST_CASE("job names") {
  for (Job j : {Job::KernelGrid, Job::SolveF, Job::Propagate, Job::Validate, Job::OracleCompare})
    CHECK(job_from_name(job_name(j)) == j);
  CHECK(job_from_name("kernel") == Job::KernelGrid);
  CHECK(job_from_name("classical") == Job::SolveF);
  CHECK(job_from_name("compare") == Job::OracleCompare);
  CHECK_THROWS_AS(job_from_name("nope"), ConfigError);
}

TEST_CASE("config hash ignores the output location only") {
  ExperimentConfig a = parse_config(kMinimal);
  ExperimentConfig b = a;
  b.output_dir = "/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a).find_first_not_of("0123456789abcdef") == std::string::npos);
  b.mu = 1.0 + 1e-15;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}

TEST_CASE("kernel-grid output matches the library") {
  ExperimentConfig c = parse_config(kMinimal);
  c.output_dir = scratch("kernel").string();
  const RunResult r = run(c);
  CHECK(r.exit_code == 0);
  const auto rows = lines_of(slurp(fs::path(c.output_dir) / "kernel.csv"));
  REQUIRE(rows.size() == 26);
  CHECK(rows[0] == "q_a,t_a,q_b,t_b,re_K,im_K,abs_K,phase,caustic_flag");
  const auto cells = split(rows[7]);
  REQUIRE(cells.size() == 9);
  const double qa = std::stod(cells[0]), qb = std::stod(cells[2]);
  const KernelValue k = evaluate_kernel({1.0, c.profile, qa, 0.0, qb, 1.0}, c.solve);
  CHECK(std::stod(cells[4]) == doctest::Approx(k.amplitude.real()).epsilon(1e-9));
  CHECK(std::stod(cells[5]) == doctest::Approx(k.amplitude.imag()).epsilon(1e-9));
  CHECK(cells[8] == "none");
  CHECK(r.manifest.at("config_hash") == config_hash(c));
  CHECK(fs::exists(fs::path(c.output_dir) / "manifest.json"));
}

TEST_CASE("solve-f output") {
  ExperimentConfig c = parse_config(kMinimal);
  c.job = Job::SolveF;
  c.samples = 11;
  c.output_dir = scratch("solve").string();
  run(c);
  const auto rows = lines_of(slurp(fs::path(c.output_dir) / "classical.csv"));
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == "t,u,udot,v,vdot,wronskian");
  const auto last = split(rows.back());
  CHECK(std::stod(last[0]) == 1.0);
  CHECK(std::stod(last[1]) == doctest::Approx(std::cos(1.0)).epsilon(1e-9));
  CHECK(std::stod(last[3]) == doctest::Approx(std::sin(1.0)).epsilon(1e-9));
  CHECK(std::fabs(std::stod(last[5]) - 1.0) < 1e-9);
}

TEST_CASE("validate exit codes") {
  ExperimentConfig c = parse_config({{"job", "validate"}, {"profile", {{"type", "delta_pulse"}, {"omega0", 1.0}, {"t0", 0.5}}}});
  c.output_dir = scratch("validate_loose").string();
  CHECK(run(c).exit_code == 0);
  c.strict = true;
  c.output_dir = scratch("validate_strict").string();
  const RunResult strict = run(c);
  CHECK(strict.exit_code == 2);
  CHECK(strict.manifest.at("exit_code") == 2);
  const std::string csv = slurp(fs::path(c.output_dir) / "validate.csv");
  CHECK(csv.rfind("check,value,threshold,pass\n", 0) == 0);
  CHECK(csv.find("closed_form_residual") != std::string::npos);

  ExperimentConfig good = parse_config({{"job", "validate"}, {"profile", {{"type", "exp_decay"}, {"omega0", 1.0}, {"alpha", 1.0}}}});
  good.strict = true;
  good.output_dir = scratch("validate_good").string();
  CHECK(run(good).exit_code == 0);
}

TEST_CASE("runs are deterministic and a manifest reproduces its run") {
  ExperimentConfig c = parse_config({{"job", "propagate"}, {"profile", {{"type", "exp_decay"}, {"omega0", 1.0}, {"alpha", 1.0}}}});
  c.output_dir = scratch("det_a").string();
  const RunResult first = run(c);
  const json manifest = json::parse(slurp(fs::path(c.output_dir) / "manifest.json"));
  ExperimentConfig again = parse_config(manifest);
  CHECK(config_hash(again) == manifest.at("config_hash"));
  again.output_dir = scratch("det_b").string();
  run(again);
  for (const char* name : {"psi.csv", "psi.json"})
    CHECK(slurp(fs::path(c.output_dir) / name) == slurp(fs::path(again.output_dir) / name));
  CHECK(first.manifest.dump().find("time\"") == std::string::npos);
}

TEST_CASE("suite layout") {
  const auto configs = suite_configs("root");
  CHECK(configs.size() == 25);
  CHECK(suite_profiles().size() == 5);
  for (const auto& c : configs) CHECK(fs::path(c.output_dir).parent_path().parent_path() == fs::path("root"));
}

TEST_CASE("atomic writes leave no temporary files") {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "a.txt", "one");
  write_atomic(dir / "a.txt", "two");
  CHECK(slurp(dir / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
}

TEST_CASE("command-line exit codes") {
  const char* cli = std::getenv("TDHO_CLI");
  if (!cli) {
    MESSAGE("TDHO_CLI not set; skipping command-line checks");
    return;
  }
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "empty.json") << "{}";
    std::ofstream(dir / "delta.json")
        << R"({"job": "validate", "profile": {"type": "delta_pulse", "omega0": 1, "t0": 0.5}})";
  }
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + cli + "\" " + args + " > \"" + (dir / "log.txt").string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("kernel --config \"" + (dir / "empty.json").string() + "\"") == 1);
  CHECK(slurp(dir / "log.txt").find("$.profile") != std::string::npos);
  CHECK(status("validate --config \"" + (dir / "delta.json").string() + "\" --strict --out \"" + (dir / "v").string() + "\"") == 2);
  CHECK(status("validate --config \"" + (dir / "delta.json").string() + "\" --out \"" + (dir / "v2").string() + "\"") == 0);
  CHECK(status("classical --profile '{\"type\":\"constant\",\"omega0\":2}' --samples 5 --out \"" + (dir / "c").string() + "\"") == 0);
  CHECK(lines_of(slurp(dir / "c" / "classical.csv")).size() == 6);
}
