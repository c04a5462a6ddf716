#pragma once

#include "qhd/field.hpp"

#include <span>
#include <vector>

namespace qhd::fft {

/// In-place forward DFT over the grid shape (unnormalized).
void forward(const Grid& grid, std::span<Complex> data);

/// In-place inverse DFT over the grid shape, normalized so inverse(forward(x)) == x.
void inverse(const Grid& grid, std::span<Complex> data);

/// Angular wavenumbers 2*pi*m/L along one axis in FFT order. The Nyquist entry
/// (even counts) holds -pi/h.
std::vector<double> wavenumbers(const Grid& grid, int axis);

}  // namespace qhd::fft
