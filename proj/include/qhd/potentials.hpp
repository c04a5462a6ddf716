#pragma once

#include "qhd/field.hpp"
#include "qhd/units.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qhd {

namespace potential {

struct Free {};

/// U = m omega^2 |q|^2 / 2
struct Harmonic {
  double omega = 1.0;
};

/// U = -kappa |q|^2 / 2
struct InvertedHarmonic {
  double kappa = 1.0;
};

/// Infinite well: realized by a dirichlet-zero grid with U = 0 inside.
struct Box {};

/// U = height exp(-|q - center|^2 / (2 width^2))
struct GaussianBarrier {
  double height = 1.0;
  std::vector<double> center;
  double width = 1.0;
};

/// Wall perpendicular to axis 0 at x = wall_position, wall_cells grid cells
/// thick, with rectangular apertures of width slit_width centered on each
/// entry of slit_centers (axis-1 coordinates). 2D grids only.
struct DoubleSlit {
  double height = 1.0;
  double wall_position = 0.0;
  std::vector<double> slit_centers;
  double slit_width = 1.0;
  int wall_cells = 1;
};

struct Tabulated {
  RealField values;
};

}  // namespace potential

using PotentialSpec = std::variant<potential::Free, potential::Harmonic, potential::InvertedHarmonic,
                                   potential::Box, potential::GaussianBarrier, potential::DoubleSlit,
                                   potential::Tabulated>;

std::string kind_name(const PotentialSpec& spec);

/// Throws PreconditionError on non-finite or out-of-range parameters.
void validate(const PotentialSpec& spec);

/// Samples U at every grid point.
RealField eval_potential(const PotentialSpec& spec, const Grid& grid, const UnitSystem& units);

/// Value, gradient and Hessian of U at a point, analytic for catalog entries.
struct PointDerivatives {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;  ///< row-major d x d
};

/// Throws PreconditionError for entries without analytic second derivatives
/// (box, double slit, tabulated).
PointDerivatives eval_point(const PotentialSpec& spec, std::span<const double> q, const UnitSystem& units);

bool has_analytic_derivatives(const PotentialSpec& spec);

}  // namespace qhd
