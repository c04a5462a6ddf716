#include "qhd/potentials.hpp"

#include <cmath>

namespace qhd {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

bool finite(double v) { return std::isfinite(v); }

double squared_radius(const Grid& g, std::size_t flat, std::span<const double> center = {}) {
  const auto idx = g.unravel(flat);
  double r2 = 0.0;
  for (int a = 0; a < g.ndim(); ++a) {
    const double c = center.empty() ? 0.0 : center[static_cast<std::size_t>(a)];
    const double d = g.coord(a, idx[static_cast<std::size_t>(a)]) - c;
    r2 += d * d;
  }
  return r2;
}

}  // namespace

std::string kind_name(const PotentialSpec& spec) {
  return std::visit(Overloaded{
                        [](const potential::Free&) { return std::string("free"); },
                        [](const potential::Harmonic&) { return std::string("harmonic"); },
                        [](const potential::InvertedHarmonic&) { return std::string("inverted-harmonic"); },
                        [](const potential::Box&) { return std::string("box"); },
                        [](const potential::GaussianBarrier&) { return std::string("gaussian-barrier"); },
                        [](const potential::DoubleSlit&) { return std::string("double-slit"); },
                        [](const potential::Tabulated&) { return std::string("tabulated"); },
                    },
                    spec);
}

void validate(const PotentialSpec& spec) {
  std::visit(Overloaded{
                 [](const potential::Free&) {},
                 [](const potential::Box&) {},
                 [](const potential::Harmonic& p) { require(finite(p.omega) && p.omega > 0.0, "harmonic: omega must be > 0"); },
                 [](const potential::InvertedHarmonic& p) {
                   require(finite(p.kappa) && p.kappa > 0.0, "inverted-harmonic: kappa must be > 0");
                 },
                 [](const potential::GaussianBarrier& p) {
                   require(finite(p.height) && p.height >= 0.0, "gaussian-barrier: height must be >= 0");
                   require(finite(p.width) && p.width > 0.0, "gaussian-barrier: width must be > 0");
                   for (double c : p.center) require(finite(c), "gaussian-barrier: center must be finite");
                 },
                 [](const potential::DoubleSlit& p) {
                   require(finite(p.height) && p.height >= 0.0, "double-slit: barrier height must be >= 0");
                   require(finite(p.slit_width) && p.slit_width > 0.0, "double-slit: slit width must be > 0");
                   require(finite(p.wall_position), "double-slit: wall position must be finite");
                   require(p.wall_cells >= 1, "double-slit: wall must be at least one cell thick");
                   require(!p.slit_centers.empty(), "double-slit: at least one slit center required");
                   for (double c : p.slit_centers) require(finite(c), "double-slit: slit centers must be finite");
                 },
                 [](const potential::Tabulated& p) {
                   for (double v : p.values.values()) require(finite(v), "tabulated: values must be finite");
                 },
             },
             spec);
}

RealField eval_potential(const PotentialSpec& spec, const Grid& grid, const UnitSystem& units) {
  validate(spec);
  RealField u(grid, 0.0);
  std::visit(Overloaded{
                 [](const potential::Free&) {},
                 [](const potential::Box&) {},
                 [&](const potential::Harmonic& p) {
                   const double c = 0.5 * units.mass() * p.omega * p.omega;
                   for (std::size_t i = 0; i < u.size(); ++i) u[i] = c * squared_radius(grid, i);
                 },
                 [&](const potential::InvertedHarmonic& p) {
                   for (std::size_t i = 0; i < u.size(); ++i) u[i] = -0.5 * p.kappa * squared_radius(grid, i);
                 },
                 [&](const potential::GaussianBarrier& p) {
                   require(p.center.empty() || static_cast<int>(p.center.size()) == grid.ndim(),
                           "gaussian-barrier: center dimension does not match grid");
                   const double inv = 1.0 / (2.0 * p.width * p.width);
                   for (std::size_t i = 0; i < u.size(); ++i)
                     u[i] = p.height * std::exp(-squared_radius(grid, i, p.center) * inv);
                 },
                 [&](const potential::DoubleSlit& p) {
                   require(grid.ndim() == 2, "double-slit: requires a 2D grid");
                   const double h0 = grid.spacing(0);
                   const double first = std::round((p.wall_position - grid.bounds(0).lower) / h0);
                   require(first >= 0.0 && first + p.wall_cells <= static_cast<double>(grid.count(0)),
                           "double-slit: wall lies outside the grid");
                   const auto i_begin = static_cast<std::size_t>(first);
                   const auto i_end = i_begin + static_cast<std::size_t>(p.wall_cells);
                   const double half = 0.5 * p.slit_width;
                   for (std::size_t i0 = i_begin; i0 < i_end; ++i0) {
                     for (std::size_t i1 = 0; i1 < grid.count(1); ++i1) {
                       const double y = grid.coord(1, i1);
                       bool open = false;
                       for (double c : p.slit_centers) open = open || std::abs(y - c) <= half;
                       u.at(i0, i1) = open ? 0.0 : p.height;
                     }
                   }
                 },
                 [&](const potential::Tabulated& p) {
                   require(p.values.grid() == grid, "tabulated potential: grid mismatch");
                   u = p.values;
                 },
             },
             spec);
  return u;
}

bool has_analytic_derivatives(const PotentialSpec& spec) {
  return std::holds_alternative<potential::Free>(spec) || std::holds_alternative<potential::Harmonic>(spec) ||
         std::holds_alternative<potential::InvertedHarmonic>(spec) ||
         std::holds_alternative<potential::GaussianBarrier>(spec);
}

PointDerivatives eval_point(const PotentialSpec& spec, std::span<const double> q, const UnitSystem& units) {
  const std::size_t d = q.size();
  PointDerivatives out;
  out.gradient.assign(d, 0.0);
  out.hessian.assign(d * d, 0.0);
  auto quadratic = [&](double c) {
    // U = c |q|^2 / 2
    for (std::size_t i = 0; i < d; ++i) {
      out.value += 0.5 * c * q[i] * q[i];
      out.gradient[i] = c * q[i];
      out.hessian[i * d + i] = c;
    }
  };
  std::visit(Overloaded{
                 [](const potential::Free&) {},
                 [&](const potential::Harmonic& p) { quadratic(units.mass() * p.omega * p.omega); },
                 [&](const potential::InvertedHarmonic& p) { quadratic(-p.kappa); },
                 [&](const potential::GaussianBarrier& p) {
                   require(p.center.empty() || p.center.size() == d, "gaussian-barrier: center dimension mismatch");
                   const double s2 = p.width * p.width;
                   std::vector<double> r(d);
                   double r2 = 0.0;
                   for (std::size_t i = 0; i < d; ++i) {
                     r[i] = q[i] - (p.center.empty() ? 0.0 : p.center[i]);
                     r2 += r[i] * r[i];
                   }
                   const double v = p.height * std::exp(-r2 / (2.0 * s2));
                   out.value = v;
                   for (std::size_t i = 0; i < d; ++i) {
                     out.gradient[i] = -v * r[i] / s2;
                     for (std::size_t j = 0; j < d; ++j)
                       out.hessian[i * d + j] = v * (r[i] * r[j] / (s2 * s2) - (i == j ? 1.0 / s2 : 0.0));
                   }
                 },
                 [&](const auto&) {
                   throw PreconditionError(kind_name(spec) + " potential has no analytic second derivatives");
                 },
             },
             spec);
  return out;
}

}  // namespace qhd
