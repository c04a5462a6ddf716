#pragma once

#include "qhd/bohm.hpp"
#include "qhd/potentials.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qhd {

struct ClassicalState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;
};

/// First variation (xi, eta) of a phase-space point.
struct VariationalState {
  std::vector<double> xi;
  std::vector<double> eta;
};

/// H = |p|^2 / 2m + U(q).
struct HamiltonianSpec {
  PotentialSpec potential = potential::Free{};
  double mass = 1.0;
};

double hamiltonian(const HamiltonianSpec& spec, const ClassicalState& x);

struct ClassicalTrajectory {
  double dt = 0.0;
  std::vector<ClassicalState> states;  ///< states[0] is the initial state
};

/// Classical RK4 on dq/dt = p/m, dp/dt = -grad U. Throws NumericalError with
/// the step index when the state stops being finite.
ClassicalTrajectory hamilton_flow(const HamiltonianSpec& spec, const ClassicalState& x0, double dt, std::size_t steps);

struct VariationalTrajectory {
  std::vector<double> times;
  std::vector<VariationalState> states;
};

/// Linearized canonical equations along a reference trajectory:
/// xi' = eta/m, eta' = -Hess U(q_ref(t)) xi. The reference is re-integrated
/// jointly with the variations; its samples coincide with `reference`.
VariationalTrajectory variational_flow(const HamiltonianSpec& spec, const ClassicalTrajectory& reference,
                                       const VariationalState& v0);

/// C(t) = sum_s (xi_a eta_b - eta_a xi_b) at every common time stamp.
std::vector<double> poincare_invariant(const VariationalTrajectory& a, const VariationalTrajectory& b);

// ── Lyapunov exponents ───────────────────────────────────────────────────

/// Autonomous or time-dependent vector field dx/dt = f(t, x).
struct Flow {
  std::size_t dim = 0;
  std::function<void(double t, std::span<const double> x, std::span<double> dxdt)> rhs;
};

/// Phase-space flow (q, p) of a Hamiltonian in `ndim` dimensions.
Flow classical_flow(const HamiltonianSpec& spec, int ndim);

/// Configuration-space flow dq/dt = v(q) of a frozen guidance field.
Flow bohm_flow(const FrozenVelocity& v);

struct LyapunovOptions {
  double horizon = 200.0;
  double renorm_interval = 1.0;
  double dt = 0.01;  ///< rounded down so that it divides the renormalization interval
  double offset = 1e-8;
  std::uint64_t seed = 0;  ///< drives the offset direction ("lyapunov-offset" stream)
};

struct LyapunovInterval {
  std::size_t interval = 0;
  double log_growth = 0.0;
  double lambda_running = 0.0;
};

struct LyapunovResult {
  /// Growth exponent; the decay-positive characteristic value is -lambda_max.
  double lambda_max = 0.0;
  std::vector<LyapunovInterval> intervals;
};

/// Benettin two-trajectory estimate of the largest growth exponent.
LyapunovResult lyapunov_estimate(const Flow& flow, std::span<const double> x0, const LyapunovOptions& options);

struct CharacteristicOptions {
  double horizon = 200.0;
  double renorm_interval = 1.0;
  double dt = 0.01;
  double tolerance = 0.02;
};

struct CharacteristicVerdict {
  std::vector<double> exponents;  ///< growth exponent per variational solution
  double gram_determinant = 0.0;  ///< of the normalized initial variations
  double tolerance = 0.0;
  bool stable = false;            ///< all |exponent| <= tolerance
};

/// Growth exponent of each variational solution along the reference, with the
/// linear flow renormalized every interval. The initial set must be independent.
CharacteristicVerdict zero_characteristic_check(const HamiltonianSpec& spec, const ClassicalState& reference,
                                                std::span<const VariationalState> solutions,
                                                const CharacteristicOptions& options = {});

}  // namespace qhd
