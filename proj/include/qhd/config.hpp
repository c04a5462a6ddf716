#pragma once

#include "qhd/bohm.hpp"
#include "qhd/grid.hpp"
#include "qhd/potentials.hpp"
#include "qhd/tdse.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhd {

struct GridConfig {
  std::vector<Interval> bounds;
  std::vector<std::size_t> points;
  Boundary boundary = Boundary::Periodic;
};

/// One analytic or computed state. `kind` is gaussian, eigenstate or plane-wave.
struct StateComponent {
  std::string kind = "gaussian";
  std::vector<double> center;
  std::vector<double> sigma;
  std::vector<double> momentum;
  std::size_t n = 0;    ///< eigenstate index
  double weight = 1.0;  ///< superposition coefficient modulus
  double phase = 0.0;   ///< superposition coefficient argument (radians)
};

struct InitialStateConfig {
  std::string kind = "gaussian";  ///< gaussian, eigenstate, plane-wave or superposition
  StateComponent state;
  std::vector<StateComponent> components;
};

struct PotentialConfig {
  PotentialSpec spec = potential::Free{};
  std::string file;  ///< tabulated potentials: QHDF dump, relative to the config file
};

struct TrajectoryConfig {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t substeps = 4;
  Interpolation interpolation = Interpolation::Linear;
  std::size_t write_particles = 100;  ///< world-lines written to trajectories.csv
  std::size_t bins = 50;              ///< histogram bins for equivariance
  int histogram_axis = 0;
};

struct SpectrumConfig {
  std::size_t states = 4;
};

struct LyapunovConfig {
  double horizon = 200.0;
  double renorm_interval = 1.0;
  double offset = 1e-8;
  std::uint64_t seed = 0;
};

struct ClassicalConfig {
  std::vector<double> q;
  std::vector<double> p;
  double dt = 0.01;
  std::size_t steps = 1000;
  /// Initial variations as (xi..., eta...); defaults to the unit basis.
  std::vector<std::vector<double>> variations;
  std::optional<LyapunovConfig> lyapunov;
  double stability_tolerance = 0.02;
};

struct DiagnosticRequest {
  std::string name;
  std::optional<double> tolerance;
};

/// Fully validated scenario with every default filled in.
struct ScenarioConfig {
  std::string name;
  UnitSystem units;
  std::optional<GridConfig> grid;
  PotentialConfig potential;
  std::optional<InitialStateConfig> initial_state;
  std::optional<EvolutionConfig> evolution;
  std::optional<TrajectoryConfig> trajectories;
  std::optional<SpectrumConfig> spectrum;
  std::optional<ClassicalConfig> classical;
  std::vector<DiagnosticRequest> diagnostics;
  std::string output_directory;
  std::filesystem::path base_dir;  ///< directory of the config file, for relative paths

  Grid make_grid() const;
};

/// Names accepted in the diagnostics list, in report order.
const std::vector<std::string>& diagnostic_names();

/// Default tolerance of a diagnostic.
double default_tolerance(const std::string& diagnostic);

/// Parses and validates a YAML scenario. Collects every problem and throws
/// ConfigError listing all of them.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical YAML echo of a parsed config, defaults included. Key order and
/// number formatting are fixed, so equal configs give equal text.
std::string canonical_yaml(const ScenarioConfig& config);

/// 16 hex digits over the canonical text (output directory excluded).
std::string config_hash(const ScenarioConfig& config);

/// Closest candidate by edit distance, empty when nothing is reasonably close.
std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates);

}  // namespace qhd
