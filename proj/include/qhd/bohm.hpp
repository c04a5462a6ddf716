#pragma once

#include "qhd/field.hpp"
#include "qhd/rng.hpp"
#include "qhd/tdse.hpp"
#include "qhd/units.hpp"

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qhd {

// ── Quantum potential ────────────────────────────────────────────────────

/// Q sampled on a grid. Masked points carry no value (stored as 0).
struct QField {
  RealField values;
  NodeMask mask;
  UnitSystem units;
};

/// Q = -hbar^2/(2m) lap(A)/A at unmasked points.
QField quantum_potential(const RealField& amplitude, const NodeMask& mask, const UnitSystem& units);

/// Same Q evaluated from psi through lap(A)/A = Re(lap psi/psi) + |Im(grad psi/psi)|^2.
/// Needs derivatives of psi only, so it stays accurate where |psi| has kinks.
QField quantum_potential_from_psi(const ComplexField& psi, const UnitSystem& units);

/// Q from phase dynamics alone: Q = -dS/dt - U - |grad S|^2/2m.
/// dS/dt is the centered difference hbar*arg(psi_{j+1} conj psi_{j-1}) / (t_{j+1} - t_{j-1}),
/// which requires equally spaced neighbours and |dS/dt| * 2 dt < pi hbar.
QField quantum_potential_hj(const WaveTimeline& timeline, std::size_t index, const RealField& potential);

// ── Guidance velocity ────────────────────────────────────────────────────

struct VelocityField {
  Grid grid;
  std::vector<RealField> components;  ///< one per axis
  NodeMask mask;
};

/// v = (hbar/m) Im(conj(psi) grad psi) / |psi|^2 with |psi|^2 floored at
/// kNodeThreshold * max|psi|^2, so values stay finite at masked points.
VelocityField velocity_field(const ComplexField& psi, const UnitSystem& units);

// ── Initial conditions ───────────────────────────────────────────────────

using Point = std::array<double, 2>;

/// Draws positions from the piecewise-linear (bilinear in 2D) interpolant of
/// a density: inverse CDF in 1D, marginal then conditional inverse CDF in 2D.
std::vector<Point> sample_initial_positions(const RealField& density, std::size_t count, Rng& rng);

/// Uses the "sampling" stream of `seed`.
std::vector<Point> sample_initial_positions(const RealField& density, std::size_t count, std::uint64_t seed);

// ── Trajectories ─────────────────────────────────────────────────────────

enum class Interpolation { Linear, Cubic };

std::string to_string(Interpolation i);
Interpolation interpolation_from_string(const std::string& s);

/// Point queries of a time-independent velocity field with the same spatial
/// interpolants as the trajectory integrator. Periodic axes wrap.
class FrozenVelocity {
 public:
  FrozenVelocity(const VelocityField& v, Interpolation kind);
  Point operator()(const Point& q) const;
  int ndim() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct TrajectoryOptions {
  std::size_t substeps = 4;  ///< RK4 steps per snapshot interval
  Interpolation interpolation = Interpolation::Linear;
  unsigned threads = 1;
  std::uint64_t seed = 0;  ///< recorded as metadata
};

/// World-lines q_k(t_j) sampled at the timeline's snapshot times.
struct TrajectoryEnsemble {
  int ndim = 1;
  std::size_t particles = 0;
  std::vector<double> times;
  std::vector<Point> positions;           ///< [sample * particles + particle]; NaN after escape
  std::vector<std::size_t> valid_samples; ///< per particle, samples recorded before escaping
  Boundary boundary = Boundary::Periodic; ///< periodic: wrapped into bounds; dirichlet: truncated on exit
  double dt_sub = 0.0;
  Interpolation interpolation = Interpolation::Linear;
  std::uint64_t seed = 0;
  std::size_t halved_steps = 0;           ///< RK4 steps split because they crossed a node
  std::vector<std::string> warnings;

  const Point& at(std::size_t sample, std::size_t particle) const { return positions[sample * particles + particle]; }
  bool escaped(std::size_t particle) const { return valid_samples[particle] < times.size(); }
  std::size_t escaped_count() const;
};

/// Integrates dq/dt = v(q, t) with classical RK4: v is interpolated in space
/// (linear or Catmull-Rom cubic) and linearly in time between snapshots. An
/// RK4 step whose path enters a cell touching a masked node is redone once as
/// two half steps.
TrajectoryEnsemble integrate_trajectories(const WaveTimeline& timeline, std::span<const Point> positions,
                                          const TrajectoryOptions& options);

}  // namespace qhd
