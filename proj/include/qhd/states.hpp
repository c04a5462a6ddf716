#pragma once

#include "qhd/field.hpp"
#include "qhd/units.hpp"

#include <span>

namespace qhd::states {

/// Normalized Gaussian packet with |psi|^2 of standard deviation sigma[a]
/// along each axis and mean momentum p[a]:
///   psi ~ prod_a exp(-(x_a - c_a)^2 / (4 sigma_a^2) + i p_a x_a / hbar).
ComplexField gaussian(const Grid& grid, std::span<const double> center, std::span<const double> sigma,
                      std::span<const double> momentum, const UnitSystem& units);

/// Normalized plane wave exp(i p.x / hbar).
ComplexField plane_wave(const Grid& grid, std::span<const double> momentum, const UnitSystem& units);

/// Promotes a real field to a complex one.
ComplexField from_real(const RealField& f);

}  // namespace qhd::states
