#include "qhd/bohm.hpp"

#include "qhd/operators.hpp"

#include <cmath>

namespace qhd {

QField quantum_potential(const RealField& amplitude, const NodeMask& mask, const UnitSystem& units) {
  if (!(mask.grid == amplitude.grid())) throw PreconditionError("mask grid does not match amplitude grid");
  for (double a : amplitude.values())
    if (!(a >= 0.0)) throw PreconditionError("amplitude must be non-negative");
  const auto lap = laplacian(amplitude);
  const double c = -units.hbar() * units.hbar() / (2.0 * units.mass());
  QField q{RealField(amplitude.grid(), 0.0), mask, units};
  for (std::size_t i = 0; i < amplitude.size(); ++i)
    if (!mask(i) && amplitude[i] > 0.0) q.values[i] = c * lap[i] / amplitude[i];
  return q;
}

QField quantum_potential_from_psi(const ComplexField& psi, const UnitSystem& units) {
  const auto qf = quotient_fields(psi, units);
  const double c = -units.hbar() * units.hbar() / (2.0 * units.mass());
  QField q{RealField(psi.grid(), 0.0), qf.mask, units};
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (!qf.mask(i)) q.values[i] = c * qf.lap_amp_over_amp[i];
  return q;
}

QField quantum_potential_hj(const WaveTimeline& timeline, std::size_t index, const RealField& potential) {
  if (index == 0 || index + 1 >= timeline.size())
    throw PreconditionError("quantum_potential_hj needs an interior snapshot");
  const auto& prev = timeline[index - 1];
  const auto& cur = timeline[index];
  const auto& next = timeline[index + 1];
  const double dt_minus = cur.t - prev.t;
  const double dt_plus = next.t - cur.t;
  if (std::abs(dt_plus - dt_minus) > 1e-9 * std::max(dt_plus, dt_minus))
    throw PreconditionError("quantum_potential_hj needs equally spaced neighbouring snapshots");
  if (!(potential.grid() == cur.psi.grid())) throw PreconditionError("potential grid mismatch");

  const UnitSystem& units = timeline.units;
  const auto qf = quotient_fields(cur.psi, units);
  const double inv_2dt = 1.0 / (next.t - prev.t);
  QField q{RealField(cur.psi.grid(), 0.0), qf.mask, units};
  const int nd = cur.psi.grid().ndim();
  for (std::size_t i = 0; i < cur.psi.size(); ++i) {
    if (qf.mask(i)) continue;
    const double dS_dt = units.hbar() * std::arg(next.psi[i] * std::conj(prev.psi[i])) * inv_2dt;
    double grad_sq = 0.0;
    for (int a = 0; a < nd; ++a) grad_sq += qf.grad_phase[static_cast<std::size_t>(a)][i] * qf.grad_phase[static_cast<std::size_t>(a)][i];
    q.values[i] = -dS_dt - potential[i] - grad_sq / (2.0 * units.mass());
  }
  return q;
}

VelocityField velocity_field(const ComplexField& psi, const UnitSystem& units) {
  for (const auto& z : psi.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("psi is not finite");
  auto qf = quotient_fields(psi, units);
  VelocityField v{psi.grid(), {}, std::move(qf.mask)};
  const double inv_m = 1.0 / units.mass();
  for (auto& g : qf.grad_phase) {
    for (auto& x : g.values()) x *= inv_m;
    v.components.push_back(std::move(g));
  }
  return v;
}

std::string to_string(Interpolation i) { return i == Interpolation::Linear ? "linear" : "cubic"; }

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "linear") return Interpolation::Linear;
  if (s == "cubic") return Interpolation::Cubic;
  throw PreconditionError("unknown interpolation '" + s + "'");
}

}  // namespace qhd
