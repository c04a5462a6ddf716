#pragma once

#include "qhd/error.hpp"
#include "qhd/grid.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qhd {

using Complex = std::complex<double>;

/// Samples of a scalar quantity on a grid, one per grid point.
template <class T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(Grid grid, T fill = T{}) : grid_(std::move(grid)), data_(grid_.size(), fill) {}
  Field(Grid grid, std::vector<T> data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_.size()) throw PreconditionError("field sample count does not match grid");
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  const T& at(std::size_t i0, std::size_t i1 = 0) const { return data_[grid_.index(i0, i1)]; }
  T& at(std::size_t i0, std::size_t i1 = 0) { return data_[grid_.index(i0, i1)]; }

 private:
  Grid grid_;
  std::vector<T> data_;
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

/// Points where |psi|^2 falls below a fixed fraction of its maximum. Quotient
/// fields (Q, velocity, phase) carry no meaningful value there.
struct NodeMask {
  Grid grid;
  std::vector<std::uint8_t> masked;

  bool operator()(std::size_t i) const { return masked[i] != 0; }
  bool any() const noexcept;
  std::size_t count() const noexcept;
};

/// Relative |psi|^2 threshold below which a point counts as a node.
inline constexpr double kNodeThreshold = 1e-12;

}  // namespace qhd
