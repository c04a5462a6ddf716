#pragma once

#include "qhd/bohm.hpp"
#include "qhd/classical.hpp"
#include "qhd/diagnostics.hpp"
#include "qhd/tdse.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qhd::csv {

/// Shortest text that parses back to the same double; "nan" for NaN.
std::string number(double x);

std::string spectrum(const EigenSolution& sol);
/// First `max_particles` world-lines, one row per (sample, particle).
std::string trajectories(const TrajectoryEnsemble& ens, std::size_t max_particles);
/// Last sample of every particle; escaped particles carry escaped=1 and NaN.
std::string final_positions(const TrajectoryEnsemble& ens);
std::string histogram(const EquivarianceStats& st);
std::string classical(const ClassicalTrajectory& traj, const HamiltonianSpec& spec);
/// First variational solution, plus C against the second when given.
std::string variational(const VariationalTrajectory& first, const std::vector<double>& invariant);
std::string lyapunov(const LyapunovResult& r);
std::string characteristic(const CharacteristicVerdict& v);

/// Rebuilds a one-sample ensemble from final_positions.csv.
TrajectoryEnsemble read_final_positions(const std::filesystem::path& path, double t_final, Boundary boundary);

std::vector<ReportEntry> read_diagnostics(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace qhd::csv
