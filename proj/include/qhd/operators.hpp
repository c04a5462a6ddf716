#pragma once

#include "qhd/field.hpp"
#include "qhd/units.hpp"

#include <vector>

namespace qhd {

// Differential and integral operators on uniform grids. Periodic grids use
// spectral (Fourier) differentiation; dirichlet grids use second-order central
// differences with second-order one-sided stencils on the walls.

RealField gradient(const RealField& f, int axis);
ComplexField gradient(const ComplexField& f, int axis);

RealField laplacian(const RealField& f);
ComplexField laplacian(const ComplexField& f);

/// Riemann sum h*sum(f) on periodic grids, trapezoidal rule on dirichlet grids.
double integrate(const RealField& f);

/// Integral of |psi|^2.
double norm_squared(const ComplexField& psi);

/// Rescales psi to unit L2 norm. Throws on a zero field.
ComplexField normalize(const ComplexField& psi);

/// P = |psi|^2.
RealField density(const ComplexField& psi);

NodeMask node_mask(const ComplexField& psi, double threshold = kNodeThreshold);

struct PolarForm {
  RealField amplitude;  ///< A = |psi|
  RealField phase;      ///< S = hbar*arg(psi), principal branch
  NodeMask mask;
};

/// psi = A exp(iS/hbar).
PolarForm polar_decompose(const ComplexField& psi, const UnitSystem& units);

/// Spatial derivatives of psi shared by the quotient-field diagnostics.
struct PsiDerivatives {
  std::vector<ComplexField> grad;  ///< one per axis
  ComplexField lap;
};
PsiDerivatives derivatives(const ComplexField& psi);

/// Pointwise quotient fields computed from psi without phase unwrapping.
///
/// With w = grad(psi)/psi:  grad(S) = hbar Im w,  grad(A)/A = Re w,
/// lap(S) = hbar Im(lap(psi)/psi - w.w),  lap(A)/A = Re(lap(psi)/psi) + |Im w|^2.
/// |psi|^2 is floored at threshold*max|psi|^2 in every denominator.
struct QuotientFields {
  std::vector<RealField> grad_phase;      ///< grad S per axis
  std::vector<RealField> grad_log_amp;    ///< grad A / A per axis
  RealField lap_phase;                    ///< lap S
  RealField lap_amp_over_amp;             ///< lap A / A
  NodeMask mask;
};
QuotientFields quotient_fields(const ComplexField& psi, const UnitSystem& units,
                               double threshold = kNodeThreshold);

/// Pointwise linear combination a*f + b*g on a shared grid.
RealField axpby(double a, const RealField& f, double b, const RealField& g);

}  // namespace qhd
