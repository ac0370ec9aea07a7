#pragma once

#include "aniso_heat/errors.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

namespace aniso_heat {

/// Uniform FFT grid on the box [-Lx, Lx)^N with n points per axis.
/// Grid point i along an axis sits at -Lx + i*h, h = 2 Lx / n; x = 0 is the
/// node n/2. Frequencies are xi_k = k~ * pi / Lx with signed index k~.
struct SpatialGrid {
    int dim = 1;
    int n = 64;       // points per axis, power of two, >= 64
    double box = 40.; // half-width Lx

    SpatialGrid() = default;
    SpatialGrid(int dim_, int n_, double box_) : dim(dim_), n(n_), box(box_) { validate(); }

    void validate() const {
        if (dim < 1 || dim > 3) throw validation_error("SpatialGrid: dimension must be 1, 2 or 3");
        if (n < 64 || (n & (n - 1)) != 0) {
            std::ostringstream os;
            os << "SpatialGrid: n = " << n << " must be a power of two and >= 64";
            throw validation_error(os.str());
        }
        if (!(box > 0.0)) throw validation_error("SpatialGrid: box half-width must be positive");
    }

    double h() const { return 2.0 * box / static_cast<double>(n); }
    double coord(int i) const { return -box + h() * static_cast<double>(i); }
    /// Signed frequency index of DFT index k.
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    double freq(int k) const { return static_cast<double>(signed_index(k)) * (std::numbers::pi / box); }
    /// Largest represented frequency magnitude per axis.
    double freq_max() const { return std::numbers::pi / h(); }

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int d = 0; d < dim; ++d) s *= n;
        return s;
    }

    /// Default grids: n = 4096 (N=1), 1024 (N=2), 256 (N=3), Lx = 40.
    static SpatialGrid defaults_for(int dim) {
        const int n = dim == 1 ? 4096 : (dim == 2 ? 1024 : 256);
        return SpatialGrid(dim, n, 40.0);
    }
};

/// Multilinear interpolation of a row-major gridded field at point x.
/// Throws range_error when x falls outside the grid box.
double grid_interpolate(const SpatialGrid& grid, const std::vector<double>& field, const double* x);

/// Uniform sampling lattice for solution fields (not FFT-bound: any point
/// counts >= 2, arbitrary box).
struct SampleLattice {
    int dim = 1;
    std::array<int, 3> npts = {2, 1, 1};
    std::array<double, 3> min = {0.0, 0.0, 0.0};
    std::array<double, 3> step = {1.0, 0.0, 0.0};

    static SampleLattice centered(int dim, int npts_per_axis, double half_width) {
        SampleLattice lat;
        lat.dim = dim;
        for (int d = 0; d < dim; ++d) {
            lat.npts[d] = npts_per_axis;
            lat.min[d] = -half_width;
            lat.step[d] = 2.0 * half_width / static_cast<double>(npts_per_axis - 1);
        }
        return lat;
    }

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int d = 0; d < dim; ++d) s *= npts[d];
        return s;
    }
    double coord(int d, int i) const { return min[d] + step[d] * static_cast<double>(i); }
    void decode(std::int64_t idx, int* iout) const {
        for (int d = dim - 1; d >= 0; --d) {
            iout[d] = static_cast<int>(idx % npts[d]);
            idx /= npts[d];
        }
    }
    void point(std::int64_t idx, double* xout) const {
        int iv[3];
        decode(idx, iv);
        for (int d = 0; d < dim; ++d) xout[d] = coord(d, iv[d]);
    }
};

/// Multilinear interpolation on a sample lattice (clamped at the boundary).
double lattice_interpolate(const SampleLattice& lat, const std::vector<double>& field, const double* x);

} // namespace aniso_heat
