#pragma once

#include "qhd/config.hpp"
#include "qhd/diagnostics.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhd {

enum class RunMode { Run, Spectrum, Trajectories, Classical };

std::string to_string(RunMode m);

namespace exit_code {
inline constexpr int kPass = 0;
inline constexpr int kDiagnosticsFailed = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kRuntimeError = 3;
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path out;  ///< empty: config output directory, else ./runs/<name>-<hash>
  unsigned threads = 1;
  bool quiet = true;
  RunMode mode = RunMode::Run;
};

struct RunManifest {
  std::string scenario;
  std::string mode;
  std::string config_hash;
  std::filesystem::path directory;
  std::vector<std::string> files;  ///< relative to directory
  double wall_clock_seconds = 0.0;
  std::map<std::string, std::string> versions;
  bool pass = false;
  std::string error;  ///< module error with context, empty on success
  int exit_code = exit_code::kRuntimeError;

  std::string to_json() const;
};

/// Replaces every seed of the config (trajectories and lyapunov).
void override_seed(ScenarioConfig& config, std::uint64_t seed);

std::filesystem::path default_output_directory(const ScenarioConfig& config);

/// Executes the pipeline selected by `options.mode` and writes all artifacts.
/// Module errors are caught and recorded in the manifest.
RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct DiagnoseResult {
  DiagnosticsReport report;
  std::vector<std::string> mismatches;  ///< entries that differ from the stored report
  int exit_code = exit_code::kRuntimeError;
};

/// Recomputes the diagnostics of a finished run from its stored artifacts and
/// compares them with its diagnostics.csv.
DiagnoseResult diagnose(const std::filesystem::path& run_dir);

}  // namespace qhd
