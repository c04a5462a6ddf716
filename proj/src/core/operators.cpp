#include "qhd/operators.hpp"

#include "qhd/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qhd {
namespace {

// ── Line iteration ────────────────────────────────────────────────────────

struct LineLayout {
  std::size_t lines;
  std::size_t length;
  std::size_t stride;
  std::size_t line_offset(std::size_t line, const Grid& g, int axis) const {
    if (g.ndim() == 1) return 0;
    return axis == 0 ? line : line * g.count(1);
  }
};

LineLayout layout(const Grid& g, int axis) {
  if (g.ndim() == 1) return {1, g.count(0), 1};
  if (axis == 0) return {g.count(1), g.count(0), g.count(1)};
  return {g.count(0), g.count(1), 1};
}

void check_axis(const Grid& g, int axis) {
  if (axis < 0 || axis >= g.ndim())
    throw PreconditionError("axis " + std::to_string(axis) + " out of range for " +
                            std::to_string(g.ndim()) + "D grid");
}

// ── Finite differences (dirichlet grids) ─────────────────────────────────

template <class T>
Field<T> fd_first(const Field<T>& f, int axis) {
  const Grid& g = f.grid();
  const auto lay = layout(g, axis);
  const double inv2h = 1.0 / (2.0 * g.spacing(axis));
  Field<T> out(g);
  const auto n = lay.length;
  for (std::size_t l = 0; l < lay.lines; ++l) {
    const std::size_t off = lay.line_offset(l, g, axis);
    auto in = [&](std::size_t j) -> const T& { return f[off + j * lay.stride]; };
    auto res = [&](std::size_t j) -> T& { return out[off + j * lay.stride]; };
    res(0) = (-3.0 * in(0) + 4.0 * in(1) - in(2)) * inv2h;
    for (std::size_t j = 1; j + 1 < n; ++j) res(j) = (in(j + 1) - in(j - 1)) * inv2h;
    res(n - 1) = (3.0 * in(n - 1) - 4.0 * in(n - 2) + in(n - 3)) * inv2h;
  }
  return out;
}

template <class T>
void fd_second_accumulate(const Field<T>& f, int axis, Field<T>& out) {
  const Grid& g = f.grid();
  const auto lay = layout(g, axis);
  const double h = g.spacing(axis);
  const double invh2 = 1.0 / (h * h);
  const auto n = lay.length;
  for (std::size_t l = 0; l < lay.lines; ++l) {
    const std::size_t off = lay.line_offset(l, g, axis);
    auto in = [&](std::size_t j) -> const T& { return f[off + j * lay.stride]; };
    auto res = [&](std::size_t j) -> T& { return out[off + j * lay.stride]; };
    res(0) += (2.0 * in(0) - 5.0 * in(1) + 4.0 * in(2) - in(3)) * invh2;
    for (std::size_t j = 1; j + 1 < n; ++j) res(j) += (in(j - 1) - 2.0 * in(j) + in(j + 1)) * invh2;
    res(n - 1) += (2.0 * in(n - 1) - 5.0 * in(n - 2) + 4.0 * in(n - 3) - in(n - 4)) * invh2;
  }
}

// ── Spectral (periodic grids) ─────────────────────────────────────────────

std::vector<Complex> spectral_first(const Grid& g, std::vector<Complex> data, int axis) {
  fft::forward(g, data);
  const auto k = fft::wavenumbers(g, axis);
  const std::size_t n = g.count(axis);
  const bool has_nyquist = n % 2 == 0;
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    const std::size_t j = g.unravel(flat)[static_cast<std::size_t>(axis)];
    if (has_nyquist && j == n / 2)
      data[flat] = 0.0;
    else
      data[flat] *= Complex(0.0, k[j]);
  }
  fft::inverse(g, data);
  return data;
}

std::vector<Complex> spectral_laplacian(const Grid& g, std::vector<Complex> data) {
  fft::forward(g, data);
  const auto k0 = fft::wavenumbers(g, 0);
  const auto k1 = g.ndim() == 2 ? fft::wavenumbers(g, 1) : std::vector<double>{0.0};
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    const auto idx = g.unravel(flat);
    const double kk = k0[idx[0]] * k0[idx[0]] + k1[idx[1]] * k1[idx[1]];
    data[flat] *= -kk;
  }
  fft::inverse(g, data);
  return data;
}

std::vector<Complex> to_complex(const RealField& f) {
  return {f.values().begin(), f.values().end()};
}

RealField real_part(const Grid& g, const std::vector<Complex>& data) {
  RealField out(g);
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
  return out;
}

double max_density(const ComplexField& psi) {
  double m = 0.0;
  for (const auto& z : psi.values()) m = std::max(m, std::norm(z));
  return m;
}

}  // namespace

RealField gradient(const RealField& f, int axis) {
  check_axis(f.grid(), axis);
  if (!f.grid().periodic()) return fd_first(f, axis);
  return real_part(f.grid(), spectral_first(f.grid(), to_complex(f), axis));
}

ComplexField gradient(const ComplexField& f, int axis) {
  check_axis(f.grid(), axis);
  if (!f.grid().periodic()) return fd_first(f, axis);
  return ComplexField(f.grid(), spectral_first(f.grid(), f.data(), axis));
}

RealField laplacian(const RealField& f) {
  const Grid& g = f.grid();
  if (g.periodic()) return real_part(g, spectral_laplacian(g, to_complex(f)));
  RealField out(g, 0.0);
  for (int a = 0; a < g.ndim(); ++a) fd_second_accumulate(f, a, out);
  return out;
}

ComplexField laplacian(const ComplexField& f) {
  const Grid& g = f.grid();
  if (g.periodic()) return ComplexField(g, spectral_laplacian(g, f.data()));
  ComplexField out(g, Complex{});
  for (int a = 0; a < g.ndim(); ++a) fd_second_accumulate(f, a, out);
  return out;
}

double integrate(const RealField& f) {
  const Grid& g = f.grid();
  if (g.periodic()) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * g.cell_volume();
  }
  auto weight = [&](int axis, std::size_t j) {
    return (j == 0 || j + 1 == g.count(axis)) ? 0.5 : 1.0;
  };
  double s = 0.0;
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const auto idx = g.unravel(flat);
    double w = weight(0, idx[0]);
    if (g.ndim() == 2) w *= weight(1, idx[1]);
    s += w * f[flat];
  }
  return s * g.cell_volume();
}

RealField density(const ComplexField& psi) {
  RealField p(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
  return p;
}

double norm_squared(const ComplexField& psi) { return integrate(density(psi)); }

ComplexField normalize(const ComplexField& psi) {
  const double n2 = norm_squared(psi);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw PreconditionError("cannot normalize a zero or non-finite field");
  const double s = 1.0 / std::sqrt(n2);
  ComplexField out = psi;
  for (auto& z : out.values()) z *= s;
  return out;
}

NodeMask node_mask(const ComplexField& psi, double threshold) {
  NodeMask m{psi.grid(), std::vector<std::uint8_t>(psi.size(), 0)};
  const double cut = threshold * max_density(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) m.masked[i] = std::norm(psi[i]) < cut ? 1 : 0;
  return m;
}

PolarForm polar_decompose(const ComplexField& psi, const UnitSystem& units) {
  for (const auto& z : psi.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("psi is not finite");
  PolarForm out{RealField(psi.grid()), RealField(psi.grid()), node_mask(psi)};
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out.amplitude[i] = std::abs(psi[i]);
    out.phase[i] = units.hbar() * std::arg(psi[i]);
  }
  return out;
}

PsiDerivatives derivatives(const ComplexField& psi) {
  PsiDerivatives d;
  for (int a = 0; a < psi.grid().ndim(); ++a) d.grad.push_back(gradient(psi, a));
  d.lap = laplacian(psi);
  return d;
}

QuotientFields quotient_fields(const ComplexField& psi, const UnitSystem& units, double threshold) {
  const Grid& g = psi.grid();
  const auto d = derivatives(psi);
  const double floor = threshold * max_density(psi);
  const double hbar = units.hbar();

  QuotientFields q;
  q.mask = node_mask(psi, threshold);
  q.lap_phase = RealField(g);
  q.lap_amp_over_amp = RealField(g);
  for (int a = 0; a < g.ndim(); ++a) {
    q.grad_phase.emplace_back(g);
    q.grad_log_amp.emplace_back(g);
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Complex conj_psi = std::conj(psi[i]);
    const double rho = std::max(std::norm(psi[i]), floor);
    Complex ww = 0.0;
    double im_w_sq = 0.0;
    for (int a = 0; a < g.ndim(); ++a) {
      const Complex w = conj_psi * d.grad[static_cast<std::size_t>(a)][i] / rho;
      q.grad_phase[static_cast<std::size_t>(a)][i] = hbar * w.imag();
      q.grad_log_amp[static_cast<std::size_t>(a)][i] = w.real();
      ww += w * w;
      im_w_sq += w.imag() * w.imag();
    }
    const Complex lap_ratio = conj_psi * d.lap[i] / rho;
    q.lap_phase[i] = hbar * (lap_ratio - ww).imag();
    q.lap_amp_over_amp[i] = lap_ratio.real() + im_w_sq;
  }
  return q;
}

RealField axpby(double a, const RealField& f, double b, const RealField& g) {
  if (!(f.grid() == g.grid())) throw PreconditionError("axpby: grid mismatch");
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = a * f[i] + b * g[i];
  return out;
}

}  // namespace qhd
