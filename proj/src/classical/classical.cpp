#include "qhd/classical.hpp"

#include "qhd/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace qhd {
namespace {

using State = std::vector<double>;
using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

void rk4_step(const Rhs& f, double t, State& x, double h, std::array<State, 5>& work) {
  const std::size_t n = x.size();
  for (auto& w : work) w.resize(n);
  auto& [k1, k2, k3, k4, tmp] = work;
  f(t, x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  f(t + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool finite(const State& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

UnitSystem classical_units(const HamiltonianSpec& spec) { return UnitSystem::make(1.0, spec.mass); }

void check_spec(const HamiltonianSpec& spec) {
  if (!(std::isfinite(spec.mass) && spec.mass > 0.0)) throw PreconditionError("mass must be finite and > 0");
  validate(spec.potential);
}

void check_state(const ClassicalState& x) {
  if (x.q.empty() || x.q.size() != x.p.size()) throw PreconditionError("q and p must have the same non-zero dimension");
  if (x.q.size() > 2) throw PreconditionError("at most 2 degrees of freedom are supported");
  for (double v : x.q)
    if (!std::isfinite(v)) throw PreconditionError("state is not finite");
  for (double v : x.p)
    if (!std::isfinite(v)) throw PreconditionError("state is not finite");
}

/// Derivatives of the joint system (q, p, xi_1, eta_1, ..., xi_k, eta_k).
Rhs joint_rhs(const HamiltonianSpec& spec, std::size_t d, std::size_t k) {
  const auto units = classical_units(spec);
  const double inv_m = 1.0 / spec.mass;
  return [spec, units, d, k, inv_m](double, std::span<const double> x, std::span<double> dx) {
    const auto q = x.subspan(0, d);
    const auto der = eval_point(spec.potential, q, units);
    for (std::size_t i = 0; i < d; ++i) {
      dx[i] = x[d + i] * inv_m;
      dx[d + i] = -der.gradient[i];
    }
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t base = 2 * d * (s + 1);
      for (std::size_t i = 0; i < d; ++i) {
        dx[base + i] = x[base + d + i] * inv_m;
        double h = 0.0;
        for (std::size_t j = 0; j < d; ++j) h += der.hessian[i * d + j] * x[base + j];
        dx[base + d + i] = -h;
      }
    }
  };
}

}  // namespace

double hamiltonian(const HamiltonianSpec& spec, const ClassicalState& x) {
  double kin = 0.0;
  for (double p : x.p) kin += p * p;
  return 0.5 * kin / spec.mass + eval_point(spec.potential, x.q, classical_units(spec)).value;
}

ClassicalTrajectory hamilton_flow(const HamiltonianSpec& spec, const ClassicalState& x0, double dt, std::size_t steps) {
  check_spec(spec);
  check_state(x0);
  if (!(dt > 0.0 && std::isfinite(dt))) throw PreconditionError("dt must be finite and > 0");
  if (!has_analytic_derivatives(spec.potential))
    throw PreconditionError(kind_name(spec.potential) + " potential is not smooth enough for hamilton_flow");
  const std::size_t d = x0.q.size();
  const auto f = joint_rhs(spec, d, 0);

  ClassicalTrajectory out;
  out.dt = dt;
  out.states.reserve(steps + 1);
  out.states.push_back(x0);
  State x(2 * d);
  std::copy(x0.q.begin(), x0.q.end(), x.begin());
  std::copy(x0.p.begin(), x0.p.end(), x.begin() + static_cast<std::ptrdiff_t>(d));
  std::array<State, 5> work;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = x0.t + static_cast<double>(n - 1) * dt;
    rk4_step(f, t, x, dt, work);
    if (!finite(x)) throw NumericalError("hamilton_flow produced a non-finite state", static_cast<std::ptrdiff_t>(n));
    ClassicalState s;
    s.q.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
    s.p.assign(x.begin() + static_cast<std::ptrdiff_t>(d), x.end());
    s.t = x0.t + static_cast<double>(n) * dt;
    out.states.push_back(std::move(s));
  }
  return out;
}

VariationalTrajectory variational_flow(const HamiltonianSpec& spec, const ClassicalTrajectory& reference,
                                       const VariationalState& v0) {
  check_spec(spec);
  if (reference.states.empty()) throw PreconditionError("reference trajectory is empty");
  if (!has_analytic_derivatives(spec.potential))
    throw PreconditionError(kind_name(spec.potential) + " potential has no second derivatives for variational_flow");
  const auto& r0 = reference.states.front();
  check_state(r0);
  const std::size_t d = r0.q.size();
  if (v0.xi.size() != d || v0.eta.size() != d) throw PreconditionError("variation dimension must match the reference");

  const auto f = joint_rhs(spec, d, 1);
  State x(4 * d);
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = r0.q[i];
    x[d + i] = r0.p[i];
    x[2 * d + i] = v0.xi[i];
    x[3 * d + i] = v0.eta[i];
  }
  VariationalTrajectory out;
  out.times.push_back(r0.t);
  out.states.push_back(v0);
  std::array<State, 5> work;
  for (std::size_t n = 1; n < reference.states.size(); ++n) {
    rk4_step(f, reference.states[n - 1].t, x, reference.dt, work);
    if (!finite(x)) throw NumericalError("variational_flow produced a non-finite state", static_cast<std::ptrdiff_t>(n));
    VariationalState v;
    v.xi.assign(x.begin() + static_cast<std::ptrdiff_t>(2 * d), x.begin() + static_cast<std::ptrdiff_t>(3 * d));
    v.eta.assign(x.begin() + static_cast<std::ptrdiff_t>(3 * d), x.end());
    out.times.push_back(reference.states[n].t);
    out.states.push_back(std::move(v));
  }
  return out;
}

std::vector<double> poincare_invariant(const VariationalTrajectory& a, const VariationalTrajectory& b) {
  if (a.times != b.times) throw PreconditionError("variational solutions have mismatched time stamps");
  std::vector<double> c(a.times.size(), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n) {
    const auto& sa = a.states[n];
    const auto& sb = b.states[n];
    if (sa.xi.size() != sb.xi.size()) throw PreconditionError("variational solutions differ in dimension");
    for (std::size_t s = 0; s < sa.xi.size(); ++s) c[n] += sa.xi[s] * sb.eta[s] - sa.eta[s] * sb.xi[s];
  }
  return c;
}

Flow classical_flow(const HamiltonianSpec& spec, int ndim) {
  check_spec(spec);
  if (ndim < 1 || ndim > 2) throw PreconditionError("classical flow supports 1 or 2 dimensions");
  if (!has_analytic_derivatives(spec.potential))
    throw PreconditionError(kind_name(spec.potential) + " potential is not smooth enough for a classical flow");
  const auto d = static_cast<std::size_t>(ndim);
  return {2 * d, joint_rhs(spec, d, 0)};
}

Flow bohm_flow(const FrozenVelocity& v) {
  const auto d = static_cast<std::size_t>(v.ndim());
  return {d, [v, d](double, std::span<const double> x, std::span<double> dx) {
            Point q{x[0], d > 1 ? x[1] : 0.0};
            const Point u = v(q);
            for (std::size_t i = 0; i < d; ++i) dx[i] = u[i];
          }};
}

LyapunovResult lyapunov_estimate(const Flow& flow, std::span<const double> x0, const LyapunovOptions& options) {
  if (x0.size() != flow.dim) throw PreconditionError("initial state dimension does not match the flow");
  if (!(options.renorm_interval > 0.0 && options.dt > 0.0 && options.offset > 0.0))
    throw PreconditionError("renorm_interval, dt and offset must be > 0");
  if (!(options.horizon >= 10.0 * options.renorm_interval))
    throw PreconditionError("horizon must be at least 10 renormalization intervals");

  const auto substeps = static_cast<std::size_t>(std::ceil(options.renorm_interval / options.dt - 1e-9));
  const double h = options.renorm_interval / static_cast<double>(substeps);
  const auto n_intervals = static_cast<std::size_t>(std::llround(options.horizon / options.renorm_interval));

  State ref(x0.begin(), x0.end());
  State dir(flow.dim);
  Rng rng(options.seed, streams::kLyapunovOffset);
  for (auto& v : dir) v = 2.0 * rng.uniform() - 1.0;
  const double dn = norm(dir);
  if (!(dn > 0.0)) throw NumericalError("degenerate offset direction");
  State off(flow.dim);
  for (std::size_t i = 0; i < flow.dim; ++i) off[i] = ref[i] + options.offset * dir[i] / dn;

  LyapunovResult out;
  std::array<State, 5> work;
  double t = 0.0;
  double total = 0.0;
  State sep(flow.dim);
  for (std::size_t k = 0; k < n_intervals; ++k) {
    for (std::size_t s = 0; s < substeps; ++s) {
      rk4_step(flow.rhs, t, ref, h, work);
      rk4_step(flow.rhs, t, off, h, work);
      t += h;
    }
    if (!finite(ref) || !finite(off))
      throw NumericalError("lyapunov_estimate: trajectory became non-finite", static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = 0; i < flow.dim; ++i) sep[i] = off[i] - ref[i];
    const double d = norm(sep);
    const double growth = d / options.offset;
    if (!(d > 0.0) || !std::isfinite(growth) || growth > 1e100)
      throw NumericalError("lyapunov_estimate: separation underflow or overflow", static_cast<std::ptrdiff_t>(k));
    if (options.offset < 1e-13 * std::max(1.0, norm(ref)))
      throw NumericalError("lyapunov_estimate: offset below the precision of the reference state",
                           static_cast<std::ptrdiff_t>(k));
    const double lg = std::log(growth);
    total += lg;
    out.intervals.push_back({k + 1, lg, total / (static_cast<double>(k + 1) * options.renorm_interval)});
    for (std::size_t i = 0; i < flow.dim; ++i) off[i] = ref[i] + options.offset * sep[i] / d;
  }
  out.lambda_max = total / (static_cast<double>(n_intervals) * options.renorm_interval);
  return out;
}

CharacteristicVerdict zero_characteristic_check(const HamiltonianSpec& spec, const ClassicalState& reference,
                                                std::span<const VariationalState> solutions,
                                                const CharacteristicOptions& options) {
  check_spec(spec);
  check_state(reference);
  if (solutions.empty()) throw PreconditionError("at least one variational solution is required");
  if (!(options.renorm_interval > 0.0 && options.dt > 0.0)) throw PreconditionError("renorm_interval and dt must be > 0");
  if (!(options.horizon >= 10.0 * options.renorm_interval))
    throw PreconditionError("horizon must be at least 10 renormalization intervals");
  if (!has_analytic_derivatives(spec.potential))
    throw PreconditionError(kind_name(spec.potential) + " potential has no second derivatives");
  const std::size_t d = reference.q.size();
  const std::size_t k = solutions.size();

  Eigen::MatrixXd basis(2 * d, static_cast<Eigen::Index>(k));
  for (std::size_t s = 0; s < k; ++s) {
    const auto& v = solutions[s];
    if (v.xi.size() != d || v.eta.size() != d) throw PreconditionError("variation dimension must match the reference");
    for (std::size_t i = 0; i < d; ++i) {
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = v.xi[i];
      basis(static_cast<Eigen::Index>(d + i), static_cast<Eigen::Index>(s)) = v.eta[i];
    }
    const double n = basis.col(static_cast<Eigen::Index>(s)).norm();
    if (!(n > 0.0)) throw PreconditionError("variational solution set is dependent (zero vector)");
    basis.col(static_cast<Eigen::Index>(s)) /= n;
  }
  CharacteristicVerdict out;
  out.tolerance = options.tolerance;
  out.gram_determinant = (basis.transpose() * basis).determinant();
  if (!(out.gram_determinant >= 1e-10)) throw PreconditionError("variational solution set is dependent (Gram determinant below 1e-10)");

  const auto substeps = static_cast<std::size_t>(std::ceil(options.renorm_interval / options.dt - 1e-9));
  const double h = options.renorm_interval / static_cast<double>(substeps);
  const auto n_intervals = static_cast<std::size_t>(std::llround(options.horizon / options.renorm_interval));
  const auto f = joint_rhs(spec, d, k);

  State x(2 * d * (k + 1));
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = reference.q[i];
    x[d + i] = reference.p[i];
  }
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t i = 0; i < 2 * d; ++i)
      x[2 * d * (s + 1) + i] = basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));

  std::vector<double> total(k, 0.0);
  std::array<State, 5> work;
  double t = reference.t;
  for (std::size_t n = 0; n < n_intervals; ++n) {
    for (std::size_t s = 0; s < substeps; ++s) {
      rk4_step(f, t, x, h, work);
      t += h;
    }
    if (!finite(x)) throw NumericalError("zero_characteristic_check: non-finite state", static_cast<std::ptrdiff_t>(n));
    for (std::size_t s = 0; s < k; ++s) {
      std::span<double> v(x.data() + 2 * d * (s + 1), 2 * d);
      const double g = norm(v);
      if (!(g > 0.0) || !std::isfinite(g))
        throw NumericalError("zero_characteristic_check: variation underflow or overflow", static_cast<std::ptrdiff_t>(n));
      total[s] += std::log(g);
      for (auto& c : v) c /= g;
    }
  }
  out.stable = true;
  for (double lg : total) {
    const double lambda = lg / (static_cast<double>(n_intervals) * options.renorm_interval);
    out.exponents.push_back(lambda);
    if (!(std::abs(lambda) <= options.tolerance)) out.stable = false;
  }
  return out;
}

}  // namespace qhd
