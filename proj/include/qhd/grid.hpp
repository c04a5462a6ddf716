#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qhd {

enum class Boundary { Periodic, DirichletZero };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double length() const noexcept { return upper - lower; }
  bool operator==(const Interval&) const = default;
};

/// Uniform Cartesian grid in one or two dimensions.
///
/// Samples sit at x_j = lower + j*h. A periodic axis has n samples covering
/// [lower, upper) with h = L/n; a dirichlet-zero axis includes both walls,
/// h = L/(n-1), and fields vanish on the walls. Storage is row-major with
/// axis 0 varying slowest.
class Grid {
 public:
  static constexpr std::size_t kMinPoints = 8;
  static constexpr int kMaxDims = 2;

  Grid() = default;

  static Grid make(std::span<const Interval> bounds, std::span<const std::size_t> counts,
                   Boundary boundary);
  static Grid make_1d(Interval bounds, std::size_t count, Boundary boundary);
  static Grid make_2d(Interval b0, std::size_t n0, Interval b1, std::size_t n1, Boundary boundary);

  int ndim() const noexcept { return ndim_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::Periodic; }

  const Interval& bounds(int axis) const { return bounds_.at(static_cast<std::size_t>(axis)); }
  std::size_t count(int axis) const { return counts_.at(static_cast<std::size_t>(axis)); }
  double spacing(int axis) const { return spacing_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const noexcept;

  /// Coordinate of sample j along an axis.
  double coord(int axis, std::size_t j) const {
    return bounds_[static_cast<std::size_t>(axis)].lower + static_cast<double>(j) * spacing(axis);
  }
  std::vector<double> coords(int axis) const;

  std::size_t index(std::size_t i0, std::size_t i1 = 0) const noexcept {
    return ndim_ == 1 ? i0 : i0 * counts_[1] + i1;
  }
  /// Splits a flat index back into per-axis indices.
  std::array<std::size_t, 2> unravel(std::size_t flat) const noexcept {
    if (ndim_ == 1) return {flat, 0};
    return {flat / counts_[1], flat % counts_[1]};
  }

  /// True for samples lying on a dirichlet wall.
  bool on_wall(std::size_t flat) const noexcept;

  /// Volume element h_0 * h_1.
  double cell_volume() const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  int ndim_ = 0;
  Boundary boundary_ = Boundary::Periodic;
  std::array<Interval, 2> bounds_{};
  std::array<std::size_t, 2> counts_{1, 1};
  std::array<double, 2> spacing_{0.0, 0.0};
};

}  // namespace qhd
