#pragma once

// Experiment runner: configuration files, parameter sweeps and report files.
//
// Config syntax (TOML subset): one `key = value` per line, `#` comments,
// values are numbers, "strings" or [arrays, of, strings]. Unknown keys are
// errors. See README.md for the key list and defaults.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "otto/engine.hpp"

namespace otto {

enum class RunMode { SingleCycle, LimitCycle, FidelityReport, CoherenceReport };

std::string to_string(RunMode mode);
/// single | limit | fidelity | coherence, with optional -cycle / -report suffix.
RunMode parse_mode(std::string_view name);

/// `count` evenly spaced points from min to max inclusive.
struct Grid {
  double min = 0.7;
  double max = 7.5;
  int count = 5;

  std::vector<double> values() const;
};

struct RunSpec {
  EngineConfig engine{};  // tau_adi, tau_iso and variant are taken from the grid
  std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
  Grid tau_adi{};
  Grid tau_iso{};
  RunMode mode = RunMode::SingleCycle;
  std::filesystem::path output_dir = "otto-out";
  int workers = 1;
  double fidelity_tol = kDefaultFidelityTol;
  int max_cycles = 50;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// Engine configuration at one grid point.
  EngineConfig at(Variant v, double tau_adi, double tau_iso) const;
  /// Everything that determines the output bytes, one `key = value` per line.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
};

/// Parses config text; `source` names the input in error messages.
RunSpec parse_config(std::string_view text, const std::string& source = "<config>");
/// Reads and parses a config file.
RunSpec load_config(const std::filesystem::path& path);

/// Plain decimal/exponent form with 12 significant digits, locale independent.
std::string format_number(double value);

inline constexpr const char* kCodeVersion = "otto-cd 0.3.0";

struct RunSummary {
  std::vector<std::filesystem::path> files;
  int tasks_total = 0;
  int tasks_run = 0;      // computed in this call
  int tasks_resumed = 0;  // already present on disk
  int failures = 0;       // grid points that recorded an error
};

/// Single- or limit-cycle sweep: one CSV per variant plus manifest.json.
RunSummary run_sweep(const RunSpec& spec);
/// Fidelity or coherence report files plus manifest.json.
RunSummary run_reports(const RunSpec& spec);
/// Dispatches on spec.mode.
RunSummary run(const RunSpec& spec);

}  // namespace otto
