#pragma once

#include "aniso_heat/grid.hpp"

#include <complex>
#include <vector>

namespace aniso_heat {

/// In-place complex DFTs on a SpatialGrid (row-major layout). Thin wrapper
/// over FFTW; planning is serialized internally, execution is reentrant.
namespace fft {

/// Unnormalized forward transform: X_k = sum_j x_j e^{-2 pi i j k / n}.
void forward(const SpatialGrid& grid, std::vector<std::complex<double>>& data);

/// Unnormalized backward transform: x_j = sum_k X_k e^{+2 pi i j k / n}.
void backward(const SpatialGrid& grid, std::vector<std::complex<double>>& data);

} // namespace fft

} // namespace aniso_heat
