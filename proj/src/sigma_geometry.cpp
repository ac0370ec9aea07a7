#include "aniso_heat/sigma_geometry.hpp"

#include "aniso_heat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace aniso_heat {

double sigma_norm(const double* x, int dim, double t, double sigma) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    return std::sqrt(r2 + std::pow(std::abs(t), 2.0 / sigma));
}

double sigma_norm(const SigmaPoint& y) {
    if (!(y.sigma > 0.0 && y.sigma < 2.0)) throw validation_error("sigma_norm: sigma outside (0,2)");
    return sigma_norm(y.x.data(), static_cast<int>(y.x.size()), y.t, y.sigma);
}

double sigma_distance(const double* x1, double t1, const double* x2, double t2, int dim,
                      double sigma) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += (x1[d] - x2[d]) * (x1[d] - x2[d]);
    return std::sqrt(r2 + std::pow(std::abs(t1 - t2), 2.0 / sigma));
}

double holder_seminorm(const SpaceTimeField& field, double alpha, const HolderOptions& options) {
    if (!(alpha > 0.0)) throw validation_error("holder_seminorm: alpha must be positive");
    field.validate();
    const SampleLattice& lat = field.lattice;
    const double sigma = field.sigma;
    const std::size_t nt = field.times.size();
    const std::int64_t npts = field.space_size();

    // Band floor: twice the lattice spacing in the σ-parabolic metric.
    double step_max = 0.0;
    for (int d = 0; d < lat.dim; ++d)
        if (lat.npts[d] > 1) step_max = std::max(step_max, lat.step[d]);
    double tstep_sigma = 0.0;
    for (std::size_t i = 1; i < nt; ++i)
        tstep_sigma = std::max(tstep_sigma, std::pow(field.times[i] - field.times[i - 1], 1.0 / sigma));
    double d_min = 2.0 * std::max(step_max, tstep_sigma);
    d_min = std::max(d_min, options.min_distance);

    // Domain diameter in the σ-parabolic metric.
    double diam2 = 0.0;
    for (int d = 0; d < lat.dim; ++d) {
        const double ext = lat.step[d] * static_cast<double>(lat.npts[d] - 1);
        diam2 += ext * ext;
    }
    const double t_ext = nt > 1 ? field.times.back() - field.times.front() : 0.0;
    const double diam = std::sqrt(diam2 + std::pow(t_ext, 2.0 / sigma));
    if (!(diam > 0.0)) throw validation_error("holder_seminorm: degenerate domain");
    if (d_min >= diam) d_min = 0.5 * diam;

    int num_bands = 1;
    while (d_min * std::pow(2.0, num_bands) < diam && num_bands < 40) ++num_bands;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::int64_t per_band = std::max<std::int64_t>(1, options.pair_budget / num_bands);
    double best = 0.0;

    for (int band = 0; band < num_bands; ++band) {
        const double lo = d_min * std::pow(2.0, band);
        const double hi = std::min(diam, 2.0 * lo);
        for (std::int64_t trial = 0; trial < per_band; ++trial) {
            const std::size_t it1 = static_cast<std::size_t>(rng() % nt);
            const std::int64_t p1 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(npts));
            double x1[3];
            lat.point(p1, x1);
            const double t1 = field.times[it1];

            // Offset of σ-norm delta, split between space and time.
            const double delta = lo + (hi - lo) * unit(rng);
            const double u = unit(rng);
            const double space_mag = delta * std::sqrt(std::max(0.0, 1.0 - u * u));
            const double time_mag = std::pow(delta * u, sigma);
            double dir[3] = {0.0, 0.0, 0.0};
            double dn = 0.0;
            for (int d = 0; d < lat.dim; ++d) {
                dir[d] = gauss(rng);
                dn += dir[d] * dir[d];
            }
            dn = std::sqrt(dn);
            const double tsign = unit(rng) < 0.5 ? -1.0 : 1.0;

            // Snap to the nearest lattice node / ladder time.
            std::int64_t p2 = 0;
            for (int d = 0; d < lat.dim; ++d) {
                const double x2d = x1[d] + (dn > 0 ? space_mag * dir[d] / dn : 0.0);
                int i = static_cast<int>(std::lround((x2d - lat.min[d]) / lat.step[d]));
                i = std::clamp(i, 0, lat.npts[d] - 1);
                p2 = p2 * lat.npts[d] + i;
            }
            const double t2_target = t1 + tsign * time_mag;
            std::size_t it2 = 0;
            {
                const auto itp =
                    std::lower_bound(field.times.begin(), field.times.end(), t2_target);
                if (itp == field.times.end()) it2 = nt - 1;
                else {
                    it2 = static_cast<std::size_t>(itp - field.times.begin());
                    if (it2 > 0 && t2_target - field.times[it2 - 1] < field.times[it2] - t2_target)
                        --it2;
                }
            }
            double x2[3];
            lat.point(p2, x2);
            const double dist = sigma_distance(x1, t1, x2, field.times[it2], lat.dim, sigma);
            if (dist < std::max(1e-14, options.min_distance)) continue;
            const double diff = std::abs(field.value(it1, p1) - field.value(it2, p2));
            const double ratio = diff / std::pow(dist, alpha);
            best = std::max(best, ratio);
        }
    }
    return best;
}

} // namespace aniso_heat
