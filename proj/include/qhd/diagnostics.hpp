#pragma once

#include "qhd/bohm.hpp"
#include "qhd/field.hpp"
#include "qhd/tdse.hpp"
#include "qhd/units.hpp"

#include <map>
#include <string>
#include <vector>

namespace qhd {

// ── Report ────────────────────────────────────────────────────────────────

struct ReportEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Append-only list of named scalar checks for one run. Every entry carries
/// its own tolerance.
class DiagnosticsReport {
 public:
  explicit DiagnosticsReport(std::string scenario = {}) : scenario_(std::move(scenario)) {}

  /// Adds an entry that passes when |value| <= tolerance.
  void add(std::string name, double value, double tolerance);
  /// Adds an entry with an externally decided verdict.
  void add(std::string name, double value, double tolerance, bool pass);
  void set_provenance(const std::string& key, const std::string& value) { provenance_[key] = value; }

  const std::string& scenario() const noexcept { return scenario_; }
  const std::vector<ReportEntry>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::string>& provenance() const noexcept { return provenance_; }
  bool all_pass() const noexcept;

  /// `name,value,tolerance,pass` with 17 significant digits.
  std::string to_csv() const;
  std::string summary() const;

 private:
  std::string scenario_;
  std::vector<ReportEntry> entries_;
  std::map<std::string, std::string> provenance_;
};

// ── Chetaev condition ────────────────────────────────────────────────────

struct ChetaevResidual {
  RealField field;  ///< L = div v, zero at masked points
  double norm = 0.0;  ///< sqrt(int P L^2) over unmasked points, P normalized
  NodeMask mask;
};

/// L = sum_i d/dq_i (g_ij dS/dq_j) with g = 1/m, i.e. the divergence of the
/// guidance velocity, evaluated as (hbar/m) Im(lap psi/psi - w.w), w = grad psi/psi.
ChetaevResidual chetaev_residual(const ComplexField& psi, const UnitSystem& units);

/// Kinetic-energy variation eps = (hbar/2) div v.
RealField epsilon_field(const ComplexField& psi, const UnitSystem& units);

// ── Hydrodynamic residuals ───────────────────────────────────────────────

struct TimeNorm {
  double t = 0.0;
  double norm = 0.0;
};

/// r = dP/dt + (1/m) div(P grad S) on every interior snapshot; P-weighted L2
/// norms. dP/dt is a centered difference over the neighbouring snapshots.
std::vector<TimeNorm> continuity_residual(const WaveTimeline& timeline);

/// Same residual for explicit density and velocity sequences, r = dP/dt + div(P v).
/// velocities[j] holds one field per axis.
std::vector<TimeNorm> continuity_residual(std::span<const double> times, std::span<const RealField> densities,
                                          std::span<const std::vector<RealField>> velocities);

struct MadelungNorms {
  double t = 0.0;
  double amplitude = 0.0;  ///< ||dA/dt + (A lap S + 2 grad A . grad S)/2m||
  double phase = 0.0;      ///< ||dS/dt + |grad S|^2/2m + U + Q||, global phase anchored
};

/// Amplitude and phase equations of the polar form on every interior snapshot.
/// The phase residual is reported relative to its value at the max-|psi| grid
/// point, which removes any spatially uniform (global-phase) contribution.
std::vector<MadelungNorms> madelung_residuals(const WaveTimeline& timeline, const RealField& potential);

// ── Uncertainty identity ─────────────────────────────────────────────────

struct UncertaintyRecord {
  double var_x = 0.0;
  double var_p = 0.0;       ///< from the momentum-space distribution
  double mean_q = 0.0;      ///< int Q P
  double grad_s_var = 0.0;  ///< int P |grad S|^2 - (int P grad S)^2
  double product = 0.0;     ///< var_x * var_p
  double bound = 0.0;       ///< hbar^2 / 4
  double mass = 1.0;
  /// |var_p - (grad_s_var + 2 m mean_q)|
  double decomposition_error() const noexcept;
};

UncertaintyRecord uncertainty_check(const ComplexField& psi, const UnitSystem& units);

// ── Perturbation action ──────────────────────────────────────────────────

struct ActionRecord {
  double action = 0.0;       ///< int Q P over unmasked points
  double fisher_form = 0.0;  ///< (hbar^2/8m) int |grad P|^2 / P
  double normalization = 0.0;
  double relative_gap() const noexcept;
};

ActionRecord perturbation_action(const ComplexField& psi, const UnitSystem& units);

/// Smooth compactly supported bump exp(-1/(1 - r^2)), r = |x - center| / width.
struct Bump {
  std::vector<double> center;
  double width = 0.1;
};

/// Central-difference Gateaux derivative of the normalized perturbation action
/// J(A) along the unit bump direction orthogonal to A:
/// [J(A + h b) - J(A - h b)] / 2h.
double stationarity_probe(const RealField& amplitude, const UnitSystem& units, const Bump& bump, double h);

// ── Equivariance ─────────────────────────────────────────────────────────

struct EquivarianceStats {
  double tv_distance = 0.0;
  double chi_square = 0.0;
  std::vector<double> bin_edges;
  std::vector<double> empirical;  ///< fraction of particles per bin
  std::vector<double> expected;   ///< integral of P_final per bin
};

/// Histogram of final particle positions along `axis` over the grid bounds
/// against the binned density; escaped particles are ignored.
EquivarianceStats equivariance_statistic(const TrajectoryEnsemble& ensemble, const RealField& final_density,
                                         std::size_t bins, int axis = 0);

/// Probability mass of the piecewise-linear interpolant of a 1D node density
/// (or of its marginal along `axis` in 2D) inside each bin.
std::vector<double> binned_mass(const RealField& density, std::span<const double> edges, int axis = 0);

}  // namespace qhd
