#include "qhd/bohm.hpp"

#include "qhd/operators.hpp"
#include "qhd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qhd {
namespace {

/// Velocity samples of one snapshot with the node mask, for fast point queries.
struct SnapshotVelocity {
  std::array<std::vector<double>, 2> v;
  std::vector<std::uint8_t> mask;
  bool any_masked = false;
};

/// Sample indices and weights of one interpolation point.
struct Stencil {
  std::array<std::size_t, 16> idx;
  std::array<double, 16> wt;
  int n = 0;

  double apply(const std::vector<double>& f) const {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += wt[static_cast<std::size_t>(k)] * f[idx[static_cast<std::size_t>(k)]];
    return s;
  }
};

class VelocityInterpolator {
 public:
  VelocityInterpolator(const Grid& g, Interpolation kind) : g_(g), kind_(kind) {}

  Stencil stencil(const Point& q) const {
    Stencil st;
    std::array<std::size_t, 4> i0, i1;
    std::array<double, 4> w0, w1;
    const int m = kind_ == Interpolation::Linear ? 2 : 4;
    axis_weights(0, q[0], i0, w0);
    if (g_.ndim() == 1) {
      for (int a = 0; a < m; ++a) {
        st.idx[static_cast<std::size_t>(a)] = i0[static_cast<std::size_t>(a)];
        st.wt[static_cast<std::size_t>(a)] = w0[static_cast<std::size_t>(a)];
      }
      st.n = m;
      return st;
    }
    axis_weights(1, q[1], i1, w1);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        st.idx[static_cast<std::size_t>(st.n)] = g_.index(i0[static_cast<std::size_t>(a)], i1[static_cast<std::size_t>(b)]);
        st.wt[static_cast<std::size_t>(st.n)] = w0[static_cast<std::size_t>(a)] * w1[static_cast<std::size_t>(b)];
        ++st.n;
      }
    return st;
  }

  /// Interpolated velocity of one snapshot at q.
  Point eval(const SnapshotVelocity& s, const Point& q) const { return eval(s, stencil(q)); }

  Point eval(const SnapshotVelocity& s, const Stencil& st) const {
    return {st.apply(s.v[0]), g_.ndim() == 2 ? st.apply(s.v[1]) : 0.0};
  }

  /// True when the grid cell containing q has a masked corner.
  bool cell_masked(const SnapshotVelocity& s, const Point& q) const {
    if (!s.any_masked) return false;
    const auto [i0, f0] = locate(0, q[0]);
    (void)f0;
    const std::size_t j0 = neighbour(0, i0, 1);
    if (g_.ndim() == 1) return s.mask[i0] || s.mask[j0];
    const auto [i1, f1] = locate(1, q[1]);
    (void)f1;
    const std::size_t j1 = neighbour(1, i1, 1);
    return s.mask[g_.index(i0, i1)] || s.mask[g_.index(j0, i1)] || s.mask[g_.index(i0, j1)] ||
           s.mask[g_.index(j0, j1)];
  }

 private:
  void axis_weights(int axis, double x, std::array<std::size_t, 4>& idx, std::array<double, 4>& w) const {
    const auto [i, t] = locate(axis, x);
    if (kind_ == Interpolation::Linear) {
      idx[0] = i;
      idx[1] = neighbour(axis, i, 1);
      w[0] = 1.0 - t;
      w[1] = t;
      return;
    }
    // Catmull-Rom weights of samples i-1 .. i+2
    const double t2 = t * t, t3 = t2 * t;
    for (int a = 0; a < 4; ++a) idx[static_cast<std::size_t>(a)] = neighbour(axis, i, a - 1);
    w[0] = 0.5 * (-t + 2.0 * t2 - t3);
    w[1] = 0.5 * (2.0 - 5.0 * t2 + 3.0 * t3);
    w[2] = 0.5 * (t + 4.0 * t2 - 3.0 * t3);
    w[3] = 0.5 * (t3 - t2);
  }

  /// Cell index and fractional offset of x along an axis.
  std::pair<std::size_t, double> locate(int axis, double x) const {
    const auto n = static_cast<std::ptrdiff_t>(g_.count(axis));
    const double s = (x - g_.bounds(axis).lower) / g_.spacing(axis);
    double fl = std::floor(s);
    double frac = s - fl;
    auto i = static_cast<std::ptrdiff_t>(fl);
    if (g_.periodic()) {
      if (i < 0 || i >= n) i = ((i % n) + n) % n;
    } else if (i < 0) {
      i = 0;
      frac = 0.0;
    } else if (i > n - 2) {
      i = n - 2;
      frac = 1.0;
    }
    return {static_cast<std::size_t>(i), frac};
  }

  std::size_t neighbour(int axis, std::size_t i, std::ptrdiff_t offset) const {
    const auto n = static_cast<std::ptrdiff_t>(g_.count(axis));
    auto j = static_cast<std::ptrdiff_t>(i) + offset;
    if (j >= 0 && j < n) return static_cast<std::size_t>(j);
    if (g_.periodic()) return static_cast<std::size_t>(((j % n) + n) % n);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, n - 1));
  }

  const Grid& g_;
  Interpolation kind_;
};

SnapshotVelocity snapshot_velocity(const ComplexField& psi, const UnitSystem& units) {
  auto vf = velocity_field(psi, units);
  SnapshotVelocity s;
  for (std::size_t c = 0; c < vf.components.size(); ++c) s.v[c] = vf.components[c].data();
  s.mask = std::move(vf.mask.masked);
  s.any_masked = std::any_of(s.mask.begin(), s.mask.end(), [](std::uint8_t m) { return m != 0; });
  return s;
}

bool outside(const Grid& g, const Point& q) {
  for (int a = 0; a < g.ndim(); ++a) {
    const auto& b = g.bounds(a);
    const double x = q[static_cast<std::size_t>(a)];
    if (!(x >= b.lower && x <= b.upper)) return true;
  }
  return false;
}

void wrap_into(const Grid& g, Point& q) {
  for (int a = 0; a < g.ndim(); ++a) {
    const auto& b = g.bounds(a);
    double& x = q[static_cast<std::size_t>(a)];
    const double l = b.length();
    double y = std::fmod(x - b.lower, l);
    if (y < 0.0) y += l;
    x = b.lower + y;
  }
}

}  // namespace

struct FrozenVelocity::Impl {
  Grid grid;
  SnapshotVelocity samples;
  Interpolation kind;
};

FrozenVelocity::FrozenVelocity(const VelocityField& v, Interpolation kind) {
  auto impl = std::make_shared<Impl>();
  impl->grid = v.grid;
  for (std::size_t c = 0; c < v.components.size(); ++c) impl->samples.v[c] = v.components[c].data();
  impl->samples.mask = v.mask.masked;
  impl->samples.any_masked = v.mask.any();
  impl->kind = kind;
  impl_ = std::move(impl);
}

Point FrozenVelocity::operator()(const Point& q) const {
  return VelocityInterpolator(impl_->grid, impl_->kind).eval(impl_->samples, q);
}

int FrozenVelocity::ndim() const noexcept { return impl_->grid.ndim(); }

std::size_t TrajectoryEnsemble::escaped_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < particles; ++k) n += escaped(k) ? 1 : 0;
  return n;
}

TrajectoryEnsemble integrate_trajectories(const WaveTimeline& timeline, std::span<const Point> positions,
                                          const TrajectoryOptions& options) {
  if (timeline.size() < 2) throw PreconditionError("trajectory integration needs at least 2 snapshots");
  if (options.substeps < 1) throw PreconditionError("substeps must be >= 1");
  const Grid& g = timeline.grid;
  const int nd = g.ndim();
  for (const auto& p : positions)
    if (outside(g, p)) throw PreconditionError("initial position outside grid bounds");

  std::vector<SnapshotVelocity> vel(timeline.size());
  parallel_for(timeline.size(), options.threads,
               [&](std::size_t j) { vel[j] = snapshot_velocity(timeline[j].psi, timeline.units); });

  TrajectoryEnsemble out;
  out.ndim = nd;
  out.particles = positions.size();
  out.boundary = g.boundary();
  out.interpolation = options.interpolation;
  out.seed = options.seed;
  for (const auto& s : timeline.snapshots) out.times.push_back(s.t);
  out.dt_sub = timeline.snapshot_interval() / static_cast<double>(options.substeps);

  // Snapshot stride advisory on the P-weighted rms speed.
  {
    double vmax = 0.0;
    for (std::size_t j = 0; j < timeline.size(); ++j) {
      const auto p = density(timeline[j].psi);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (vel[j].mask[i]) continue;
        double s2 = 0.0;
        for (int c = 0; c < nd; ++c) s2 += vel[j].v[static_cast<std::size_t>(c)][i] * vel[j].v[static_cast<std::size_t>(c)][i];
        num += p[i] * s2;
        den += p[i];
      }
      if (den > 0.0) vmax = std::max(vmax, std::sqrt(num / den));
    }
    double hmin = g.spacing(0);
    if (nd == 2) hmin = std::min(hmin, g.spacing(1));
    if (vmax * timeline.snapshot_interval() > hmin) {
      std::ostringstream msg;
      msg << "snapshot interval too coarse: rms|v|*interval = " << vmax * timeline.snapshot_interval()
          << " exceeds grid spacing " << hmin;
      out.warnings.push_back(msg.str());
    }
  }

  const std::size_t n_samples = timeline.size();
  const std::size_t n_part = positions.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.positions.assign(n_samples * n_part, Point{nan, nan});
  out.valid_samples.assign(n_part, n_samples);
  std::vector<std::size_t> halved(n_part, 0);

  const VelocityInterpolator interp(g, options.interpolation);
  const bool periodic = g.periodic();

  parallel_for(n_part, options.threads, [&](std::size_t k) {
    Point q = positions[k];
    if (nd == 1) q[1] = 0.0;
    out.positions[k] = q;
    for (std::size_t j = 0; j + 1 < n_samples; ++j) {
      const double t0 = timeline[j].t;
      const double span = timeline[j + 1].t - t0;
      const auto& va = vel[j];
      const auto& vb = vel[j + 1];
      auto velocity = [&](const Point& x, double t) {
        const double w = (t - t0) / span;
        const Stencil st = interp.stencil(x);
        const Point a = interp.eval(va, st);
        const Point b = interp.eval(vb, st);
        return Point{(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]};
      };
      auto rk4 = [&](const Point& x, double t, double h) {
        const Point k1 = velocity(x, t);
        const Point x2{x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]};
        const Point k2 = velocity(x2, t + 0.5 * h);
        const Point x3{x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]};
        const Point k3 = velocity(x3, t + 0.5 * h);
        const Point x4{x[0] + h * k3[0], x[1] + h * k3[1]};
        const Point k4 = velocity(x4, t + h);
        Point r{x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
        if (nd == 1) r[1] = 0.0;
        return r;
      };
      auto crosses_node = [&](const Point& a, const Point& b) {
        const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        for (const auto* s : {&va, &vb})
          if (interp.cell_masked(*s, mid) || interp.cell_masked(*s, b)) return true;
        return false;
      };

      bool escaped = false;
      for (std::size_t s = 0; s < options.substeps && !escaped; ++s) {
        const double t = t0 + static_cast<double>(s) * out.dt_sub;
        Point next = rk4(q, t, out.dt_sub);
        if (crosses_node(q, next)) {
          const Point half = rk4(q, t, 0.5 * out.dt_sub);
          next = rk4(half, t + 0.5 * out.dt_sub, 0.5 * out.dt_sub);
          ++halved[k];
        }
        if (!std::isfinite(next[0]) || !std::isfinite(next[1])) {
          escaped = true;
          break;
        }
        if (periodic)
          wrap_into(g, next);
        else if (outside(g, next))
          escaped = true;
        q = next;
      }
      if (escaped) {
        out.valid_samples[k] = j + 1;
        return;
      }
      out.positions[(j + 1) * n_part + k] = q;
    }
  });

  for (auto h : halved) out.halved_steps += h;
  if (out.escaped_count() > 0)
    out.warnings.push_back(std::to_string(out.escaped_count()) + " particle(s) left the dirichlet domain");
  return out;
}

}  // namespace qhd
