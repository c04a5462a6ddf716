#pragma once

#include "qhd/field.hpp"
#include "qhd/units.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qhd {

enum class Method { SplitSpectral, CrankNicolson };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct EvolutionConfig {
  double dt = 0.01;
  std::size_t steps = 1;
  Method method = Method::SplitSpectral;
  std::size_t snapshot_stride = 1;
  unsigned threads = 1;  ///< parallelism across transverse lines (2D crank-nicolson)
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  ComplexField psi;
};

/// Ordered wave-function snapshots of one evolution.
struct WaveTimeline {
  Grid grid;
  UnitSystem units;
  double dt = 0.0;              ///< solver step
  std::size_t stride = 1;       ///< solver steps between snapshots
  std::vector<Snapshot> snapshots;
  double max_norm_drift = 0.0;  ///< max |norm - 1| over all steps

  std::size_t size() const noexcept { return snapshots.size(); }
  const Snapshot& operator[](std::size_t j) const { return snapshots[j]; }
  double snapshot_interval() const noexcept { return dt * static_cast<double>(stride); }
};

using PotentialTimeline = std::function<RealField(double t)>;

/// Propagates psi0 under i hbar dpsi/dt = -hbar^2/(2m) lap psi + U psi.
///
/// Split-spectral (periodic grids) applies the Strang product
/// exp(-iU dt/2hbar) F^-1 exp(-i hbar k^2 dt/2m) F exp(-iU dt/2hbar).
/// Crank-Nicolson (dirichlet grids) solves (1 + iH dt/2hbar) psi' = (1 - iH dt/2hbar) psi
/// with the three-point Hamiltonian; 2D uses the symmetric alternating-direction
/// product C_x(dt/2) C_y(dt) C_x(dt/2), with U split evenly between the axes.
/// Snapshot 0 is psi0; every `snapshot_stride` steps another snapshot is kept,
/// and the final state is always kept.
WaveTimeline evolve(const ComplexField& psi0, const RealField& potential, const EvolutionConfig& cfg,
                    const UnitSystem& units, double t0 = 0.0);

/// Time-dependent variant: U is sampled at the midpoint of every step.
WaveTimeline evolve(const ComplexField& psi0, const PotentialTimeline& potential, const EvolutionConfig& cfg,
                    const UnitSystem& units, double t0 = 0.0);

/// H psi with the solver's discrete Hamiltonian (spectral on periodic grids,
/// three-point with zero walls on dirichlet grids).
ComplexField apply_hamiltonian(const ComplexField& psi, const RealField& potential, const UnitSystem& units);

/// <psi|H|psi> / <psi|psi>.
double energy(const ComplexField& psi, const RealField& potential, const UnitSystem& units);

struct EigenSolution {
  std::vector<double> energies;   ///< ascending
  std::vector<RealField> states;  ///< unit norm, positive spatial mean
  UnitSystem units;
};

/// Lowest n_states eigenpairs of -hbar^2/(2m) D2 + diag(U) on a 1D dirichlet grid.
EigenSolution solve_eigenpairs(const RealField& potential, std::size_t n_states, const UnitSystem& units);

struct ImaginaryTimeOptions {
  double dtau = 0.01;
  std::size_t max_iterations = 200000;
  std::optional<ComplexField> initial;
};

struct GroundState {
  double energy = 0.0;
  RealField state;
  std::size_t iterations = 0;
};

/// Ground state by imaginary-time propagation, renormalizing every step and
/// stopping once the Rayleigh quotient changes by less than tol.
GroundState imaginary_time_ground_state(const RealField& potential, const UnitSystem& units, double tol,
                                        const ImaginaryTimeOptions& options = {});

}  // namespace qhd
