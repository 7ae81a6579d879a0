// otto-cd: run engine sweeps and reports from a config file.
//
//   otto-cd run --config FILE [--mode single|limit|fidelity|coherence]
//               [--workers N] [--out DIR]
//   otto-cd validate --config FILE
//
// Exit codes: 0 success, 2 configuration error, 3 simulation failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "otto/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

int workers_from_env() {
  const char* env = std::getenv("OTTO_CD_WORKERS");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  try {
    std::size_t used = 0;
    const int n = std::stoi(env, &used);
    if (used != std::string(env).size() || n < 1) {
      throw std::invalid_argument(env);
    }
    return n;
  } catch (const std::exception&) {
    throw otto::ConfigError(std::string("OTTO_CD_WORKERS must be a positive integer, got '") +
                            env + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-time quantum Otto engine simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode;
  std::string out_dir;
  int workers = 0;

  auto* run = app.add_subcommand("run", "Run a sweep or report");
  run->add_option("--config", config_path, "Config file (TOML-style key = value)")->required();
  run->add_option("--mode", mode, "single | limit | fidelity | coherence");
  run->add_option("--workers", workers, "Worker threads (default: OTTO_CD_WORKERS or config)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");

  auto* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  otto::RunSpec spec;
  try {
    spec = otto::load_config(config_path);
    if (!mode.empty()) {
      spec.mode = otto::parse_mode(mode);
    }
    if (!out_dir.empty()) {
      spec.output_dir = out_dir;
    }
    if (const int env = workers_from_env(); env > 0) {
      spec.workers = env;
    }
    if (workers > 0) {
      spec.workers = workers;
    }
    spec.validate();
  } catch (const otto::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (validate->parsed()) {
    std::cout << spec.canonical();
    return 0;
  }

  try {
    const otto::RunSummary summary = otto::run(spec);
    for (const auto& f : summary.files) {
      std::cout << f.string() << "\n";
    }
    std::cerr << summary.tasks_run << " computed, " << summary.tasks_resumed << " resumed, "
              << summary.failures << " failed\n";
    return summary.failures > 0 ? kExitSimulation : 0;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitSimulation;
  }
}
