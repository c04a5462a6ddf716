#pragma once

#include "qhd/error.hpp"

#include <cmath>

namespace qhd {

/// Physical constants of a run: reduced Planck constant and particle mass.
/// The phase constant k of psi = A exp(i k S) is always 1/hbar.
class UnitSystem {
 public:
  UnitSystem() = default;

  static UnitSystem make(double hbar, double mass) {
    if (!(std::isfinite(hbar) && hbar > 0.0)) throw PreconditionError("hbar must be finite and > 0");
    if (!(std::isfinite(mass) && mass > 0.0)) throw PreconditionError("mass must be finite and > 0");
    UnitSystem u;
    u.hbar_ = hbar;
    u.mass_ = mass;
    u.k_ = 1.0 / hbar;
    return u;
  }

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double k() const noexcept { return k_; }

  bool operator==(const UnitSystem&) const = default;

 private:
  double hbar_ = 1.0;
  double mass_ = 1.0;
  double k_ = 1.0;
};

}  // namespace qhd
