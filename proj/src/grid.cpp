#include "aniso_heat/grid.hpp"

#include <algorithm>

namespace aniso_heat {

double grid_interpolate(const SpatialGrid& grid, const std::vector<double>& field, const double* x) {
    const double h = grid.h();
    int i0[3];
    double f[3];
    for (int d = 0; d < grid.dim; ++d) {
        const double u = (x[d] + grid.box) / h;
        if (!(u >= 0.0) || u > static_cast<double>(grid.n - 1)) {
            std::ostringstream os;
            os << "grid_interpolate: coordinate " << x[d] << " outside box [" << -grid.box << ", "
               << grid.box - h << "]";
            throw range_error(os.str());
        }
        i0[d] = std::min(static_cast<int>(u), grid.n - 2);
        f[d] = u - static_cast<double>(i0[d]);
    }
    const std::int64_t n = grid.n;
    double acc = 0.0;
    const int corners = 1 << grid.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::int64_t idx = 0;
        for (int d = 0; d < grid.dim; ++d) {
            const int bit = (c >> d) & 1;
            w *= bit ? f[d] : (1.0 - f[d]);
            idx = idx * n + (i0[d] + bit);
        }
        acc += w * field[static_cast<std::size_t>(idx)];
    }
    return acc;
}

double lattice_interpolate(const SampleLattice& lat, const std::vector<double>& field, const double* x) {
    int i0[3] = {0, 0, 0};
    double f[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < lat.dim; ++d) {
        if (lat.npts[d] < 2) continue;
        double u = (x[d] - lat.min[d]) / lat.step[d];
        u = std::clamp(u, 0.0, static_cast<double>(lat.npts[d] - 1));
        i0[d] = std::min(static_cast<int>(u), lat.npts[d] - 2);
        f[d] = u - static_cast<double>(i0[d]);
    }
    double acc = 0.0;
    const int corners = 1 << lat.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::int64_t idx = 0;
        for (int d = 0; d < lat.dim; ++d) {
            const int bit = (c >> d) & 1;
            w *= bit ? f[d] : (1.0 - f[d]);
            idx = idx * lat.npts[d] + std::min(i0[d] + bit, lat.npts[d] - 1);
        }
        acc += w * field[static_cast<std::size_t>(idx)];
    }
    return acc;
}

} // namespace aniso_heat
