#include "qhd/states.hpp"

#include "qhd/operators.hpp"

#include <cmath>

namespace qhd::states {
namespace {

void check_dims(const Grid& g, std::span<const double> v, const char* what) {
  if (static_cast<int>(v.size()) != g.ndim())
    throw PreconditionError(std::string(what) + " must have one entry per grid axis");
}

void zero_walls(ComplexField& psi) {
  const Grid& g = psi.grid();
  if (g.periodic()) return;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_wall(i)) psi[i] = 0.0;
}

}  // namespace

ComplexField gaussian(const Grid& grid, std::span<const double> center, std::span<const double> sigma,
                      std::span<const double> momentum, const UnitSystem& units) {
  check_dims(grid, center, "center");
  check_dims(grid, sigma, "sigma");
  check_dims(grid, momentum, "momentum");
  for (double s : sigma)
    if (!(s > 0.0)) throw PreconditionError("sigma must be > 0");
  ComplexField psi(grid);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    double re = 0.0, im = 0.0;
    for (int a = 0; a < grid.ndim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double x = grid.coord(a, idx[ua]);
      const double d = x - center[ua];
      re -= d * d / (4.0 * sigma[ua] * sigma[ua]);
      im += momentum[ua] * x / units.hbar();
    }
    psi[flat] = std::exp(Complex(re, im));
  }
  zero_walls(psi);
  return normalize(psi);
}

ComplexField plane_wave(const Grid& grid, std::span<const double> momentum, const UnitSystem& units) {
  check_dims(grid, momentum, "momentum");
  ComplexField psi(grid);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto idx = grid.unravel(flat);
    double phase = 0.0;
    for (int a = 0; a < grid.ndim(); ++a)
      phase += momentum[static_cast<std::size_t>(a)] * grid.coord(a, idx[static_cast<std::size_t>(a)]) / units.hbar();
    psi[flat] = std::exp(Complex(0.0, phase));
  }
  zero_walls(psi);
  return normalize(psi);
}

ComplexField from_real(const RealField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

}  // namespace qhd::states
