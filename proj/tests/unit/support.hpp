#pragma once

#include "qhd/field.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace qhd::test {

inline constexpr double kPi = std::numbers::pi;

inline RealField real_from(const Grid& g, const std::function<double(double, double)>& f) {
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [i0, i1] = g.unravel(i);
    out[i] = f(g.coord(0, i0), g.ndim() > 1 ? g.coord(1, i1) : 0.0);
  }
  return out;
}

inline ComplexField complex_from(const Grid& g, const std::function<Complex(double, double)>& f) {
  ComplexField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [i0, i1] = g.unravel(i);
    out[i] = f(g.coord(0, i0), g.ndim() > 1 ? g.coord(1, i1) : 0.0);
  }
  return out;
}

template <class Pred>
double max_abs_diff(const RealField& a, const std::function<double(double, double)>& f, Pred include) {
  const Grid& g = a.grid();
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!include(i)) continue;
    const auto [i0, i1] = g.unravel(i);
    m = std::max(m, std::abs(a[i] - f(g.coord(0, i0), g.ndim() > 1 ? g.coord(1, i1) : 0.0)));
  }
  return m;
}

inline double max_abs_diff(const RealField& a, const std::function<double(double, double)>& f) {
  return max_abs_diff(a, f, [](std::size_t) { return true; });
}

}  // namespace qhd::test
