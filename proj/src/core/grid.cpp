#include "qhd/grid.hpp"

#include "qhd/error.hpp"
#include "qhd/field.hpp"

#include <algorithm>
#include <cmath>

namespace qhd {

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "dirichlet-zero";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "dirichlet-zero" || s == "dirichlet") return Boundary::DirichletZero;
  throw PreconditionError("unknown boundary kind '" + s + "'");
}

Grid Grid::make(std::span<const Interval> bounds, std::span<const std::size_t> counts,
                Boundary boundary) {
  if (bounds.size() != counts.size()) throw PreconditionError("bounds and counts differ in length");
  if (bounds.empty() || bounds.size() > kMaxDims) throw PreconditionError("grid must be 1D or 2D");
  Grid g;
  g.ndim_ = static_cast<int>(bounds.size());
  g.boundary_ = boundary;
  for (std::size_t a = 0; a < bounds.size(); ++a) {
    const auto& b = bounds[a];
    if (!(std::isfinite(b.lower) && std::isfinite(b.upper)) || !(b.upper > b.lower))
      throw PreconditionError("axis " + std::to_string(a) + ": non-positive extent");
    if (counts[a] < kMinPoints)
      throw PreconditionError("axis " + std::to_string(a) + ": count < " + std::to_string(kMinPoints));
    g.bounds_[a] = b;
    g.counts_[a] = counts[a];
    const double cells = boundary == Boundary::Periodic ? static_cast<double>(counts[a])
                                                        : static_cast<double>(counts[a] - 1);
    g.spacing_[a] = b.length() / cells;
  }
  return g;
}

Grid Grid::make_1d(Interval bounds, std::size_t count, Boundary boundary) {
  const Interval b[] = {bounds};
  const std::size_t n[] = {count};
  return make(b, n, boundary);
}

Grid Grid::make_2d(Interval b0, std::size_t n0, Interval b1, std::size_t n1, Boundary boundary) {
  const Interval b[] = {b0, b1};
  const std::size_t n[] = {n0, n1};
  return make(b, n, boundary);
}

std::size_t Grid::size() const noexcept { return counts_[0] * (ndim_ == 2 ? counts_[1] : 1); }

std::vector<double> Grid::coords(int axis) const {
  std::vector<double> x(count(axis));
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = coord(axis, j);
  return x;
}

bool Grid::on_wall(std::size_t flat) const noexcept {
  if (boundary_ == Boundary::Periodic) return false;
  const auto idx = unravel(flat);
  for (int a = 0; a < ndim_; ++a) {
    const auto i = idx[static_cast<std::size_t>(a)];
    if (i == 0 || i + 1 == counts_[static_cast<std::size_t>(a)]) return true;
  }
  return false;
}

double Grid::cell_volume() const noexcept {
  return ndim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

bool NodeMask::any() const noexcept {
  return std::any_of(masked.begin(), masked.end(), [](auto m) { return m != 0; });
}

std::size_t NodeMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(masked.begin(), masked.end(), [](auto m) { return m != 0; }));
}

}  // namespace qhd
