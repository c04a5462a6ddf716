#include "qhd/tdse.hpp"

#include "qhd/fft.hpp"
#include "qhd/operators.hpp"
#include "qhd/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qhd {
namespace {

constexpr Complex kI{0.0, 1.0};

// ── Tridiagonal solves ────────────────────────────────────────────────────

/// Thomas factorization of a tridiagonal matrix with constant off-diagonal `a`.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(Complex a, std::span<const Complex> diag) : a_(a), cprime_(diag.size()), inv_(diag.size()) {
    Complex c_prev = 0.0;
    for (std::size_t j = 0; j < diag.size(); ++j) {
      const Complex denom = diag[j] - (j == 0 ? Complex{} : a * c_prev);
      inv_[j] = 1.0 / denom;
      cprime_[j] = a * inv_[j];
      c_prev = cprime_[j];
    }
  }

  /// Solves in place; `x` enters as the right-hand side.
  void solve(std::span<Complex> x) const {
    const std::size_t m = x.size();
    x[0] *= inv_[0];
    for (std::size_t j = 1; j < m; ++j) x[j] = (x[j] - a_ * x[j - 1]) * inv_[j];
    for (std::size_t j = m - 1; j-- > 0;) x[j] -= cprime_[j] * x[j + 1];
  }

 private:
  Complex a_{};
  std::vector<Complex> cprime_;
  std::vector<Complex> inv_;
};

struct Line {
  std::size_t offset;
  std::size_t stride;
};

/// Interior lines of a dirichlet grid along `axis`; wall samples are excluded.
std::vector<Line> interior_lines(const Grid& g, int axis) {
  std::vector<Line> lines;
  if (g.ndim() == 1) {
    lines.push_back({1, 1});
    return lines;
  }
  const std::size_t n0 = g.count(0), n1 = g.count(1);
  if (axis == 0) {
    for (std::size_t i1 = 1; i1 + 1 < n1; ++i1) lines.push_back({n1 + i1, n1});
  } else {
    for (std::size_t i0 = 1; i0 + 1 < n0; ++i0) lines.push_back({i0 * n1 + 1, 1});
  }
  return lines;
}

/// Cayley (Crank-Nicolson) or backward-Euler propagator along one axis of a
/// dirichlet grid, for the operator T_axis + weight*U.
class AxisPropagator {
 public:
  enum class Kind { Cayley, BackwardEuler };

  AxisPropagator(const Grid& g, int axis, const RealField& u, double weight, double step, Kind kind,
                 const UnitSystem& units)
      : grid_(g), axis_(axis), kind_(kind), lines_(interior_lines(g, axis)) {
    const double h = g.spacing(axis);
    const double hbar = units.hbar();
    off_ = -hbar * hbar / (2.0 * units.mass() * h * h);
    kin_diag_ = hbar * hbar / (units.mass() * h * h);
    m_ = g.count(axis) - 2;
    // Cayley: (1 + i tau H) psi' = (1 - i tau H) psi with tau = dt/2hbar.
    // Backward Euler: (1 + tau H) psi' = psi with tau = dtau/hbar.
    tau_ = kind == Kind::Cayley ? Complex(0.0, step / (2.0 * hbar)) : Complex(step / hbar, 0.0);
    factors_.reserve(lines_.size());
    diag_.resize(lines_.size());
    std::vector<Complex> lhs(m_);
    for (std::size_t l = 0; l < lines_.size(); ++l) {
      diag_[l].resize(m_);
      for (std::size_t j = 0; j < m_; ++j) {
        diag_[l][j] = kin_diag_ + weight * u[lines_[l].offset + j * lines_[l].stride];
        lhs[j] = 1.0 + tau_ * diag_[l][j];
      }
      factors_.emplace_back(tau_ * off_, lhs);
    }
  }

  void apply(ComplexField& psi, unsigned threads) const {
    parallel_for(lines_.size(), threads, [&](std::size_t l) {
      const auto [offset, stride] = lines_[l];
      std::vector<Complex> x(m_);
      for (std::size_t j = 0; j < m_; ++j) x[j] = psi[offset + j * stride];
      std::vector<Complex> rhs(m_);
      if (kind_ == Kind::Cayley) {
        for (std::size_t j = 0; j < m_; ++j) {
          const Complex left = j > 0 ? x[j - 1] : Complex{};
          const Complex right = j + 1 < m_ ? x[j + 1] : Complex{};
          rhs[j] = (1.0 - tau_ * diag_[l][j]) * x[j] - tau_ * off_ * (left + right);
        }
      } else {
        rhs = x;
      }
      factors_[l].solve(rhs);
      for (std::size_t j = 0; j < m_; ++j) psi[offset + j * stride] = rhs[j];
    });
  }

 private:
  Grid grid_;
  int axis_;
  Kind kind_;
  std::vector<Line> lines_;
  std::size_t m_ = 0;
  double off_ = 0.0;
  double kin_diag_ = 0.0;
  Complex tau_{};
  std::vector<std::vector<double>> diag_;
  std::vector<Tridiagonal> factors_;
};

// ── Steppers ──────────────────────────────────────────────────────────────

class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void set_potential(const RealField& u) = 0;
  virtual void step(ComplexField& psi) = 0;
};

class SplitSpectralStepper final : public Stepper {
 public:
  SplitSpectralStepper(const Grid& g, double dt, const UnitSystem& units, bool imaginary = false)
      : grid_(g), dt_(dt), units_(units), imaginary_(imaginary), kinetic_(g.size()), half_potential_(g.size()) {
    const auto k0 = fft::wavenumbers(g, 0);
    const auto k1 = g.ndim() == 2 ? fft::wavenumbers(g, 1) : std::vector<double>{0.0};
    const double c = units.hbar() * dt / (2.0 * units.mass());
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const auto idx = g.unravel(flat);
      const double kk = k0[idx[0]] * k0[idx[0]] + k1[idx[1]] * k1[idx[1]];
      kinetic_[flat] = imaginary ? Complex(std::exp(-c * kk), 0.0) : std::exp(-kI * (c * kk));
    }
  }

  void set_potential(const RealField& u) override {
    const double c = dt_ / (2.0 * units_.hbar());
    for (std::size_t i = 0; i < u.size(); ++i)
      half_potential_[i] = imaginary_ ? Complex(std::exp(-c * u[i]), 0.0) : std::exp(-kI * (c * u[i]));
  }

  void step(ComplexField& psi) override {
    auto v = psi.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_potential_[i];
    fft::forward(grid_, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kinetic_[i];
    fft::inverse(grid_, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_potential_[i];
  }

 private:
  Grid grid_;
  double dt_;
  UnitSystem units_;
  bool imaginary_;
  std::vector<Complex> kinetic_;
  std::vector<Complex> half_potential_;
};

class CrankNicolsonStepper final : public Stepper {
 public:
  CrankNicolsonStepper(const Grid& g, double dt, const UnitSystem& units, unsigned threads)
      : grid_(g), dt_(dt), units_(units), threads_(threads) {}

  void set_potential(const RealField& u) override {
    using K = AxisPropagator::Kind;
    props_.clear();
    if (grid_.ndim() == 1) {
      props_.emplace_back(grid_, 0, u, 1.0, dt_, K::Cayley, units_);
    } else {
      props_.emplace_back(grid_, 0, u, 0.5, 0.5 * dt_, K::Cayley, units_);
      props_.emplace_back(grid_, 1, u, 0.5, dt_, K::Cayley, units_);
    }
  }

  void step(ComplexField& psi) override {
    if (props_.size() == 1) {
      props_[0].apply(psi, threads_);
    } else {
      props_[0].apply(psi, threads_);
      props_[1].apply(psi, threads_);
      props_[0].apply(psi, threads_);
    }
  }

 private:
  Grid grid_;
  double dt_;
  UnitSystem units_;
  unsigned threads_;
  std::vector<AxisPropagator> props_;
};

/// Backward-Euler imaginary-time step for dirichlet grids. In 1D the full
/// Hamiltonian is inverted; in 2D the potential is split symmetrically around
/// per-axis kinetic solves.
class ImaginaryDirichletStepper final : public Stepper {
 public:
  ImaginaryDirichletStepper(const Grid& g, double dtau, const UnitSystem& units)
      : grid_(g), dtau_(dtau), units_(units), half_potential_(g.size(), 1.0) {}

  void set_potential(const RealField& u) override {
    using K = AxisPropagator::Kind;
    props_.clear();
    if (grid_.ndim() == 1) {
      props_.emplace_back(grid_, 0, u, 1.0, dtau_, K::BackwardEuler, units_);
    } else {
      const RealField zero(grid_, 0.0);
      props_.emplace_back(grid_, 0, zero, 0.0, dtau_, K::BackwardEuler, units_);
      props_.emplace_back(grid_, 1, zero, 0.0, dtau_, K::BackwardEuler, units_);
      for (std::size_t i = 0; i < u.size(); ++i) half_potential_[i] = std::exp(-0.5 * dtau_ * u[i] / units_.hbar());
    }
  }

  void step(ComplexField& psi) override {
    if (grid_.ndim() == 1) {
      props_[0].apply(psi, 1);
      return;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
    props_[0].apply(psi, 1);
    props_[1].apply(psi, 1);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
  }

 private:
  Grid grid_;
  double dtau_;
  UnitSystem units_;
  std::vector<double> half_potential_;
  std::vector<AxisPropagator> props_;
};

double sum_norm(const ComplexField& psi) { return norm_squared(psi); }

void check_compatible(const ComplexField& psi0, const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw PreconditionError("dt must be > 0");
  if (cfg.steps < 1) throw PreconditionError("steps must be >= 1");
  if (cfg.snapshot_stride < 1) throw PreconditionError("snapshot stride must be >= 1");
  const bool periodic = psi0.grid().periodic();
  if (cfg.method == Method::SplitSpectral && !periodic)
    throw PreconditionError("split-spectral requires a periodic grid");
  if (cfg.method == Method::CrankNicolson && periodic)
    throw PreconditionError("crank-nicolson requires a dirichlet-zero grid");
  const double n = sum_norm(psi0);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-8) throw PreconditionError("psi0 must be normalized");
}

WaveTimeline run(const ComplexField& psi0, const PotentialTimeline* timeline, const RealField* fixed,
                 const EvolutionConfig& cfg, const UnitSystem& units, double t0) {
  check_compatible(psi0, cfg);
  const Grid& g = psi0.grid();
  std::unique_ptr<Stepper> stepper;
  if (cfg.method == Method::SplitSpectral)
    stepper = std::make_unique<SplitSpectralStepper>(g, cfg.dt, units);
  else
    stepper = std::make_unique<CrankNicolsonStepper>(g, cfg.dt, units, cfg.threads);
  if (fixed) {
    if (!(fixed->grid() == g)) throw PreconditionError("potential grid does not match psi grid");
    stepper->set_potential(*fixed);
  }

  WaveTimeline out;
  out.grid = g;
  out.units = units;
  out.dt = cfg.dt;
  out.stride = cfg.snapshot_stride;
  out.snapshots.push_back({0, t0, psi0});
  if (!g.periodic())
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.on_wall(i)) out.snapshots.back().psi[i] = 0.0;

  ComplexField psi = out.snapshots.back().psi;
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    const double t_start = t0 + static_cast<double>(s - 1) * cfg.dt;
    if (timeline) {
      RealField u = (*timeline)(t_start + 0.5 * cfg.dt);
      if (!(u.grid() == g)) throw PreconditionError("potential grid does not match psi grid");
      stepper->set_potential(u);
    }
    stepper->step(psi);
    const double n = sum_norm(psi);
    if (!std::isfinite(n)) throw NumericalError("NaN detected during evolution", static_cast<std::ptrdiff_t>(s));
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(n - 1.0));
    if (s % cfg.snapshot_stride == 0 || s == cfg.steps)
      out.snapshots.push_back({s, t0 + static_cast<double>(s) * cfg.dt, psi});
  }
  return out;
}

}  // namespace

std::string to_string(Method m) { return m == Method::SplitSpectral ? "split-spectral" : "crank-nicolson"; }

Method method_from_string(const std::string& s) {
  if (s == "split-spectral") return Method::SplitSpectral;
  if (s == "crank-nicolson") return Method::CrankNicolson;
  throw PreconditionError("unknown method '" + s + "'");
}

WaveTimeline evolve(const ComplexField& psi0, const RealField& potential, const EvolutionConfig& cfg,
                    const UnitSystem& units, double t0) {
  return run(psi0, nullptr, &potential, cfg, units, t0);
}

WaveTimeline evolve(const ComplexField& psi0, const PotentialTimeline& potential, const EvolutionConfig& cfg,
                    const UnitSystem& units, double t0) {
  return run(psi0, &potential, nullptr, cfg, units, t0);
}

ComplexField apply_hamiltonian(const ComplexField& psi, const RealField& potential, const UnitSystem& units) {
  const Grid& g = psi.grid();
  if (!(potential.grid() == g)) throw PreconditionError("potential grid does not match psi grid");
  const double c = -units.hbar() * units.hbar() / (2.0 * units.mass());
  ComplexField out(g, Complex{});
  if (g.periodic()) {
    out = laplacian(psi);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = c * out[i] + potential[i] * psi[i];
    return out;
  }
  // Three-point stencil on interior points; wall samples are zero by construction.
  for (int a = 0; a < g.ndim(); ++a) {
    const double invh2 = 1.0 / (g.spacing(a) * g.spacing(a));
    for (const auto& line : interior_lines(g, a)) {
      const std::size_t m = g.count(a) - 2;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = line.offset + j * line.stride;
        const Complex left = j > 0 ? psi[i - line.stride] : Complex{};
        const Complex right = j + 1 < m ? psi[i + line.stride] : Complex{};
        out[i] += c * (left - 2.0 * psi[i] + right) * invh2;
      }
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_wall(i)) out[i] += potential[i] * psi[i];
  return out;
}

double energy(const ComplexField& psi, const RealField& potential, const UnitSystem& units) {
  const auto hpsi = apply_hamiltonian(psi, potential, units);
  RealField integrand(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) integrand[i] = (std::conj(psi[i]) * hpsi[i]).real();
  return integrate(integrand) / norm_squared(psi);
}

namespace {

/// Flips the sign so the spatial mean is positive. Antisymmetric states have a
/// mean at roundoff level; those are oriented by their first significant sample.
/// Two steps of shifted inverse iteration followed by a Rayleigh quotient.
/// Returns false when the shifted matrix cannot be factored.
bool refine_eigenpair(const Eigen::VectorXd& diag, double off, Eigen::VectorXd& x, double& e) {
  const Eigen::Index m = diag.size();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * m));
  for (Eigen::Index j = 0; j < m; ++j) {
    entries.emplace_back(j, j, diag[j] - e);
    if (j + 1 < m) {
      entries.emplace_back(j, j + 1, off);
      entries.emplace_back(j + 1, j, off);
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return false;
  for (int it = 0; it < 2; ++it) {
    Eigen::VectorXd y = lu.solve(x);
    if (lu.info() != Eigen::Success || !y.allFinite()) return false;
    x = y / y.norm();
  }
  double q = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    double hx = diag[j] * x[j];
    if (j > 0) hx += off * x[j - 1];
    if (j + 1 < m) hx += off * x[j + 1];
    q += x[j] * hx;
  }
  e = q;
  return true;
}

void fix_sign(RealField& f) {
  double mean = 0.0, abs_sum = 0.0, peak = 0.0;
  for (double v : f.values()) {
    mean += v;
    abs_sum += std::abs(v);
    peak = std::max(peak, std::abs(v));
  }
  double sign = 1.0;
  if (std::abs(mean) > 1e-8 * abs_sum) {
    sign = mean > 0.0 ? 1.0 : -1.0;
  } else {
    for (double v : f.values())
      if (std::abs(v) > 1e-3 * peak) {
        sign = v > 0.0 ? 1.0 : -1.0;
        break;
      }
  }
  if (sign < 0.0)
    for (auto& v : f.values()) v = -v;
}

}  // namespace

EigenSolution solve_eigenpairs(const RealField& potential, std::size_t n_states, const UnitSystem& units) {
  const Grid& g = potential.grid();
  if (g.ndim() != 1) throw PreconditionError("solve_eigenpairs supports 1D grids only; use imaginary time in 2D");
  if (g.periodic()) throw PreconditionError("solve_eigenpairs requires a dirichlet-zero grid");
  const std::size_t n = g.count(0);
  if (n_states < 1 || n_states > n / 4) throw PreconditionError("n_states must be in [1, n/4]");

  const std::size_t m = n - 2;
  const double h = g.spacing(0);
  const double t = units.hbar() * units.hbar() / (2.0 * units.mass() * h * h);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(m));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(m - 1));
  for (std::size_t j = 0; j < m; ++j) diag[static_cast<Eigen::Index>(j)] = 2.0 * t + potential[j + 1];
  sub.setConstant(-t);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");

  EigenSolution out;
  out.units = units;
  for (std::size_t s = 0; s < n_states; ++s) {
    Eigen::VectorXd col = solver.eigenvectors().col(static_cast<Eigen::Index>(s));
    double e = solver.eigenvalues()[static_cast<Eigen::Index>(s)];
    refine_eigenpair(diag, -t, col, e);
    RealField phi(g, 0.0);
    for (std::size_t j = 0; j < m; ++j) phi[j + 1] = col[static_cast<Eigen::Index>(j)];
    RealField sq(g);
    for (std::size_t i = 0; i < n; ++i) sq[i] = phi[i] * phi[i];
    const double scale = 1.0 / std::sqrt(integrate(sq));
    for (auto& v : phi.values()) v *= scale;
    fix_sign(phi);

    ComplexField cphi(g);
    for (std::size_t i = 0; i < n; ++i) cphi[i] = phi[i];
    const auto hphi = apply_hamiltonian(cphi, potential, units);
    RealField res(g);
    for (std::size_t i = 0; i < n; ++i) res[i] = std::norm(hphi[i] - e * cphi[i]);
    const double residual = std::sqrt(integrate(res));
    if (residual > 1e-6 * std::abs(e) + 1e-9)
      throw NumericalError("eigenpair " + std::to_string(s) + " residual " + std::to_string(residual) +
                           " exceeds tolerance");
    out.energies.push_back(e);
    out.states.push_back(std::move(phi));
  }
  return out;
}

GroundState imaginary_time_ground_state(const RealField& potential, const UnitSystem& units, double tol,
                                        const ImaginaryTimeOptions& options) {
  const Grid& g = potential.grid();
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be > 0");
  if (!(options.dtau > 0.0)) throw PreconditionError("dtau must be > 0");

  ComplexField psi(g);
  if (options.initial) {
    if (!(options.initial->grid() == g)) throw PreconditionError("initial guess grid mismatch");
    psi = *options.initial;
  } else {
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const auto idx = g.unravel(flat);
      double r2 = 0.0;
      for (int a = 0; a < g.ndim(); ++a) {
        const auto& b = g.bounds(a);
        const double sigma = b.length() / 8.0;
        const double d = (g.coord(a, idx[static_cast<std::size_t>(a)]) - 0.5 * (b.lower + b.upper)) / sigma;
        r2 += d * d;
      }
      psi[flat] = std::exp(-0.5 * r2);
    }
  }
  if (!g.periodic())
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.on_wall(i)) psi[i] = 0.0;
  psi = normalize(psi);

  std::unique_ptr<Stepper> stepper;
  if (g.periodic())
    stepper = std::make_unique<SplitSpectralStepper>(g, options.dtau, units, true);
  else
    stepper = std::make_unique<ImaginaryDirichletStepper>(g, options.dtau, units);
  stepper->set_potential(potential);

  double e_prev = energy(psi, potential, units);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    stepper->step(psi);
    psi = normalize(psi);
    const double e = energy(psi, potential, units);
    if (!std::isfinite(e)) throw NumericalError("imaginary-time propagation diverged", static_cast<std::ptrdiff_t>(it));
    if (std::abs(e - e_prev) < tol) {
      // Remove the global phase before taking the real part.
      std::size_t peak = 0;
      for (std::size_t i = 1; i < g.size(); ++i)
        if (std::norm(psi[i]) > std::norm(psi[peak])) peak = i;
      const Complex rot = std::conj(psi[peak]) / std::abs(psi[peak]);
      RealField state(g);
      for (std::size_t i = 0; i < g.size(); ++i) state[i] = (rot * psi[i]).real();
      RealField sq(g);
      for (std::size_t i = 0; i < g.size(); ++i) sq[i] = state[i] * state[i];
      const double scale = 1.0 / std::sqrt(integrate(sq));
      for (auto& v : state.values()) v *= scale;
      fix_sign(state);
      return {e, std::move(state), it};
    }
    e_prev = e;
  }
  throw NumericalError("imaginary-time propagation did not converge within " +
                       std::to_string(options.max_iterations) + " iterations");
}

}  // namespace qhd
