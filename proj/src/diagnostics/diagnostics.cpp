#include "qhd/diagnostics.hpp"

#include "qhd/fft.hpp"
#include "qhd/operators.hpp"

#include <algorithm>
#include <cmath>

namespace qhd {
namespace {

constexpr double kNormTolerance = 1e-6;

double weighted_norm(const RealField& r, const RealField& p, const NodeMask* mask) {
  RealField w(r.grid(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i)
    if (mask == nullptr || !(*mask)(i)) w[i] = p[i] * r[i] * r[i];
  const double total = integrate(p);
  if (!(total > 0.0)) throw PreconditionError("density integrates to zero");
  return std::sqrt(std::max(0.0, integrate(w) / total));
}

void require_normalized(const ComplexField& psi, const char* what) {
  const double n = norm_squared(psi);
  if (!(std::abs(n - 1.0) <= kNormTolerance))
    throw PreconditionError(std::string(what) + ": psi is not normalized (norm^2 = " + std::to_string(n) + ")");
}

void require_finite(const ComplexField& psi) {
  for (const auto& z : psi.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("psi is not finite");
}

std::size_t axis_index(int a) { return static_cast<std::size_t>(a); }

struct Centered {
  const Snapshot& prev;
  const Snapshot& cur;
  const Snapshot& next;
  double two_dt;
};

Centered centered(const WaveTimeline& tl, std::size_t j) {
  const double dm = tl[j].t - tl[j - 1].t;
  const double dp = tl[j + 1].t - tl[j].t;
  if (!(dm > 0.0) || std::abs(dp - dm) > 1e-9 * std::max(dp, dm))
    throw PreconditionError("centered time differences need equally spaced snapshots");
  return {tl[j - 1], tl[j], tl[j + 1], tl[j + 1].t - tl[j - 1].t};
}

void require_snapshots(const WaveTimeline& tl) {
  if (tl.size() < 3) throw PreconditionError("at least 3 snapshots are required");
}

}  // namespace

// ── Chetaev condition ────────────────────────────────────────────────────

ChetaevResidual chetaev_residual(const ComplexField& psi, const UnitSystem& units) {
  require_finite(psi);
  auto qf = quotient_fields(psi, units);
  ChetaevResidual out{RealField(psi.grid(), 0.0), 0.0, qf.mask};
  const double inv_m = 1.0 / units.mass();
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (!qf.mask(i)) out.field[i] = qf.lap_phase[i] * inv_m;
  out.norm = weighted_norm(out.field, density(psi), &out.mask);
  return out;
}

RealField epsilon_field(const ComplexField& psi, const UnitSystem& units) {
  auto r = chetaev_residual(psi, units);
  const double half_hbar = 0.5 * units.hbar();
  for (auto& x : r.field.values()) x *= half_hbar;
  return std::move(r.field);
}

// ── Hydrodynamic residuals ───────────────────────────────────────────────

std::vector<TimeNorm> continuity_residual(const WaveTimeline& timeline) {
  require_snapshots(timeline);
  const auto& units = timeline.units;
  const int nd = timeline.grid.ndim();
  const double c = units.hbar() / units.mass();
  std::vector<TimeNorm> out;
  for (std::size_t j = 1; j + 1 < timeline.size(); ++j) {
    const auto s = centered(timeline, j);
    const auto& psi = s.cur.psi;
    const auto p = density(psi);
    RealField r(psi.grid(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (std::norm(s.next.psi[i]) - std::norm(s.prev.psi[i])) / s.two_dt;
    for (int a = 0; a < nd; ++a) {
      const auto g = gradient(psi, a);
      RealField flux(psi.grid(), 0.0);
      for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = c * std::imag(std::conj(psi[i]) * g[i]);
      const auto div = gradient(flux, a);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += div[i];
    }
    out.push_back({s.cur.t, weighted_norm(r, p, nullptr)});
  }
  return out;
}

std::vector<TimeNorm> continuity_residual(std::span<const double> times, std::span<const RealField> densities,
                                          std::span<const std::vector<RealField>> velocities) {
  if (times.size() != densities.size() || times.size() != velocities.size())
    throw PreconditionError("times, densities and velocities must have equal length");
  if (times.size() < 3) throw PreconditionError("at least 3 snapshots are required");
  const Grid& grid = densities[0].grid();
  std::vector<TimeNorm> out;
  for (std::size_t j = 1; j + 1 < times.size(); ++j) {
    const double dm = times[j] - times[j - 1];
    const double dp = times[j + 1] - times[j];
    if (!(dm > 0.0) || std::abs(dp - dm) > 1e-9 * std::max(dp, dm))
      throw PreconditionError("centered time differences need equally spaced snapshots");
    if (velocities[j].size() != static_cast<std::size_t>(grid.ndim()))
      throw PreconditionError("one velocity component per axis is required");
    const auto& p = densities[j];
    RealField r(grid, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = (densities[j + 1][i] - densities[j - 1][i]) / (times[j + 1] - times[j - 1]);
    for (int a = 0; a < grid.ndim(); ++a) {
      RealField flux(grid, 0.0);
      for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = p[i] * velocities[j][axis_index(a)][i];
      const auto div = gradient(flux, a);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += div[i];
    }
    out.push_back({times[j], weighted_norm(r, p, nullptr)});
  }
  return out;
}

std::vector<MadelungNorms> madelung_residuals(const WaveTimeline& timeline, const RealField& potential) {
  require_snapshots(timeline);
  if (!(potential.grid() == timeline.grid)) throw PreconditionError("potential grid mismatch");
  const auto& units = timeline.units;
  const int nd = timeline.grid.ndim();
  const double inv_2m = 0.5 / units.mass();
  std::vector<MadelungNorms> out;
  for (std::size_t j = 1; j + 1 < timeline.size(); ++j) {
    const auto s = centered(timeline, j);
    const auto& psi = s.cur.psi;
    const auto qf = quotient_fields(psi, units);
    const auto polar = polar_decompose(psi, units);
    const auto q = quantum_potential(polar.amplitude, qf.mask, units);
    const auto p = density(psi);

    std::size_t anchor = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[anchor]) anchor = i;
    if (qf.mask(anchor)) throw PreconditionError("madelung anchor point is masked");

    RealField r_amp(psi.grid(), 0.0);
    RealField r_phase(psi.grid(), 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (qf.mask(i) && i != anchor) continue;
      const double a = polar.amplitude[i];
      double grad_s_sq = 0.0;
      double grad_a_dot_grad_s = 0.0;
      for (int ax = 0; ax < nd; ++ax) {
        const double gs = qf.grad_phase[axis_index(ax)][i];
        grad_s_sq += gs * gs;
        grad_a_dot_grad_s += a * qf.grad_log_amp[axis_index(ax)][i] * gs;
      }
      const double da_dt = (std::abs(s.next.psi[i]) - std::abs(s.prev.psi[i])) / s.two_dt;
      const double ds_dt = units.hbar() * std::arg(s.next.psi[i] * std::conj(s.prev.psi[i])) / s.two_dt;
      r_amp[i] = da_dt + inv_2m * (a * qf.lap_phase[i] + 2.0 * grad_a_dot_grad_s);
      r_phase[i] = ds_dt + inv_2m * grad_s_sq + potential[i] + q.values[i];
    }
    const double offset = r_phase[anchor];
    for (std::size_t i = 0; i < psi.size(); ++i)
      if (!qf.mask(i)) r_phase[i] -= offset;
    out.push_back({s.cur.t, weighted_norm(r_amp, p, &qf.mask), weighted_norm(r_phase, p, &qf.mask)});
  }
  return out;
}

// ── Uncertainty identity ─────────────────────────────────────────────────

double UncertaintyRecord::decomposition_error() const noexcept {
  return std::abs(var_p - (grad_s_var + 2.0 * mass * mean_q));
}

UncertaintyRecord uncertainty_check(const ComplexField& psi_in, const UnitSystem& units) {
  if (psi_in.grid().ndim() != 1) throw PreconditionError("uncertainty_check needs a 1D wave function");
  require_finite(psi_in);
  require_normalized(psi_in, "uncertainty_check");
  const auto psi = normalize(psi_in);
  const Grid& grid = psi.grid();
  const double hbar = units.hbar();
  const auto p = density(psi);

  UncertaintyRecord rec;
  {
    RealField x1(grid, 0.0), x2(grid, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double x = grid.coord(0, i);
      x1[i] = x * p[i];
      x2[i] = x * x * p[i];
    }
    const double mx = integrate(x1);
    rec.var_x = integrate(x2) - mx * mx;
  }

  if (grid.periodic()) {
    std::vector<Complex> hat(psi.values().begin(), psi.values().end());
    fft::forward(grid, hat);
    const auto k = fft::wavenumbers(grid, 0);
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const double a = std::norm(hat[i]);
      w += a;
      m1 += a * k[i];
      m2 += a * k[i] * k[i];
    }
    m1 /= w;
    m2 /= w;
    rec.var_p = hbar * hbar * (m2 - m1 * m1);
  } else {
    const auto g = gradient(psi, 0);
    const auto lap = laplacian(psi);
    RealField f1(grid, 0.0), f2(grid, 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      f1[i] = hbar * std::imag(std::conj(psi[i]) * g[i]);
      f2[i] = -hbar * hbar * std::real(std::conj(psi[i]) * lap[i]);
    }
    const double m1 = integrate(f1);
    rec.var_p = integrate(f2) - m1 * m1;
  }

  const auto q = quantum_potential_from_psi(psi, units);
  const auto qf = quotient_fields(psi, units);
  RealField qp(grid, 0.0), s1(grid, 0.0), s2(grid, 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (qf.mask(i)) continue;
    const double gs = qf.grad_phase[0][i];
    qp[i] = q.values[i] * p[i];
    s1[i] = gs * p[i];
    s2[i] = gs * gs * p[i];
  }
  rec.mean_q = integrate(qp);
  const double mean_gs = integrate(s1);
  rec.grad_s_var = integrate(s2) - mean_gs * mean_gs;
  rec.mass = units.mass();
  rec.product = rec.var_x * rec.var_p;
  rec.bound = 0.25 * hbar * hbar;
  return rec;
}

// ── Perturbation action ──────────────────────────────────────────────────

double ActionRecord::relative_gap() const noexcept {
  const double scale = std::max(std::abs(action), std::abs(fisher_form));
  if (scale == 0.0) return 0.0;
  return std::abs(action - fisher_form) / scale;
}

ActionRecord perturbation_action(const ComplexField& psi, const UnitSystem& units) {
  require_finite(psi);
  require_normalized(psi, "perturbation_action");
  const Grid& grid = psi.grid();
  const auto polar = polar_decompose(psi, units);
  const auto q = quantum_potential_from_psi(psi, units);
  const auto p = density(psi);

  ActionRecord rec;
  rec.normalization = integrate(p);
  RealField qp(grid, 0.0), fisher(grid, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!polar.mask(i)) qp[i] = q.values[i] * p[i];
  // at nodes (grad P)^2/P -> 4|grad psi|^2
  for (int a = 0; a < grid.ndim(); ++a) {
    const auto g = gradient(p, a);
    const auto gpsi = gradient(psi, a);
    for (std::size_t i = 0; i < p.size(); ++i)
      fisher[i] += polar.mask(i) ? 4.0 * std::norm(gpsi[i]) : g[i] * g[i] / p[i];
  }
  rec.action = integrate(qp);
  rec.fisher_form = units.hbar() * units.hbar() / (8.0 * units.mass()) * integrate(fisher);
  return rec;
}

double stationarity_probe(const RealField& psi, const UnitSystem& units, const Bump& bump, double h) {
  const Grid& grid = psi.grid();
  if (bump.center.size() != static_cast<std::size_t>(grid.ndim()))
    throw PreconditionError("bump center must have one coordinate per axis");
  if (!(bump.width > 0.0)) throw PreconditionError("bump width must be positive");
  if (!(h > 0.0)) throw PreconditionError("probe scale h must be positive");
  for (int a = 0; a < grid.ndim(); ++a) {
    const auto& b = grid.bounds(a);
    const double c = bump.center[axis_index(a)];
    if (!(c - bump.width > b.lower && c + bump.width < b.upper))
      throw PreconditionError("bump support hits the domain boundary");
  }
  for (double v : psi.values())
    if (!std::isfinite(v)) throw PreconditionError("psi is not finite");

  RealField b(grid, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto [i0, i1] = grid.unravel(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.ndim(); ++a) {
      const double d = (grid.coord(a, a == 0 ? i0 : i1) - bump.center[axis_index(a)]) / bump.width;
      r2 += d * d;
    }
    if (r2 < 1.0) b[i] = std::exp(-1.0 / (1.0 - r2));
  }

  auto inner = [&](const RealField& f, const RealField& g) {
    RealField fg(grid, 0.0);
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = f[i] * g[i];
    return integrate(fg);
  };
  const double aa = inner(psi, psi);
  if (!(aa > 0.0)) throw PreconditionError("psi must not vanish identically");
  b = axpby(1.0, b, -inner(b, psi) / aa, psi);
  const double bb = inner(b, b);
  if (!(bb > 0.0)) throw PreconditionError("bump is parallel to psi");
  for (auto& x : b.values()) x /= std::sqrt(bb);

  // J(A) = int Q A^2 / int A^2 = -(hbar^2/2m) int A lap A / int A^2 for real A.
  const double c = -units.hbar() * units.hbar() / (2.0 * units.mass());
  auto action = [&](const RealField& a) { return c * inner(a, laplacian(a)) / inner(a, a); };
  return (action(axpby(1.0, psi, h, b)) - action(axpby(1.0, psi, -h, b))) / (2.0 * h);
}

// ── Equivariance ─────────────────────────────────────────────────────────

std::vector<double> binned_mass(const RealField& density, std::span<const double> edges, int axis) {
  const Grid& grid = density.grid();
  if (axis < 0 || axis >= grid.ndim()) throw PreconditionError("axis out of range");
  if (edges.size() < 2) throw PreconditionError("at least one bin is required");

  const std::size_t n = grid.count(axis);
  std::vector<double> m(n, 0.0);
  if (grid.ndim() == 1) {
    for (std::size_t i = 0; i < n; ++i) m[i] = density[i];
  } else {
    const int other = 1 - axis;
    const std::size_t no = grid.count(other);
    const double ho = grid.spacing(other);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < no; ++j) {
        const double v = axis == 0 ? density.at(i, j) : density.at(j, i);
        const bool end = !grid.periodic() && (j == 0 || j + 1 == no);
        s += end ? 0.5 * v : v;
      }
      m[i] = s * ho;
    }
  }

  const double lower = grid.bounds(axis).lower;
  const double h = grid.spacing(axis);
  const std::size_t cells = grid.periodic() ? n : n - 1;
  auto node = [&](std::size_t c) { return m[c % n]; };
  std::vector<double> cum(cells + 1, 0.0);
  for (std::size_t c = 0; c < cells; ++c) cum[c + 1] = cum[c] + 0.5 * h * (node(c) + node(c + 1));
  auto cdf = [&](double x) {
    const double u = (x - lower) / h;
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(cells)) return cum[cells];
    const auto c = static_cast<std::size_t>(u);
    const double s = u - static_cast<double>(c);
    return cum[c] + h * (node(c) * s + 0.5 * (node(c + 1) - node(c)) * s * s);
  };
  const double total = cum[cells];
  if (!(total > 0.0)) throw PreconditionError("density has no mass");
  std::vector<double> out(edges.size() - 1);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) out[b] = (cdf(edges[b + 1]) - cdf(edges[b])) / total;
  return out;
}

EquivarianceStats equivariance_statistic(const TrajectoryEnsemble& ensemble, const RealField& final_density,
                                         std::size_t bins, int axis) {
  if (bins == 0) throw PreconditionError("bins must be positive");
  if (ensemble.particles == 0 || ensemble.times.empty()) throw PreconditionError("empty ensemble");
  if (ensemble.ndim != final_density.grid().ndim()) throw PreconditionError("ensemble and density dimensions differ");
  const Grid& grid = final_density.grid();
  if (axis < 0 || axis >= grid.ndim()) throw PreconditionError("axis out of range");

  EquivarianceStats st;
  const auto& bounds = grid.bounds(axis);
  const double width = bounds.length() / static_cast<double>(bins);
  st.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) st.bin_edges[b] = bounds.lower + width * static_cast<double>(b);
  st.bin_edges[bins] = bounds.upper;
  st.expected = binned_mass(final_density, st.bin_edges, axis);

  std::vector<double> counts(bins, 0.0);
  std::size_t valid = 0;
  const std::size_t last = ensemble.times.size() - 1;
  for (std::size_t k = 0; k < ensemble.particles; ++k) {
    if (ensemble.escaped(k)) continue;
    const double x = ensemble.at(last, k)[axis_index(axis)];
    if (!std::isfinite(x)) continue;
    auto b = static_cast<long>(std::floor((x - bounds.lower) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
    ++valid;
  }
  if (valid == 0) throw PreconditionError("empty ensemble: every particle escaped");

  const double nv = static_cast<double>(valid);
  st.empirical.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    st.empirical[b] = counts[b] / nv;
    st.tv_distance += 0.5 * std::abs(st.empirical[b] - st.expected[b]);
    const double e = nv * st.expected[b];
    if (e > 0.0) st.chi_square += (counts[b] - e) * (counts[b] - e) / e;
  }
  return st;
}

}  // namespace qhd
