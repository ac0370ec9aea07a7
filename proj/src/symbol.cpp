#include "aniso_heat/symbol.hpp"

#include "aniso_heat/errors.hpp"
#include "aniso_heat/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace aniso_heat {

namespace {
constexpr double kPi = std::numbers::pi;
}

double stable_constant(double sigma) {
    if (!(sigma > 0.0 && sigma < 2.0)) {
        std::ostringstream os;
        os << "stable_constant: sigma = " << sigma << " outside (0,2)";
        throw validation_error(os.str());
    }
    return std::sqrt(kPi) * std::tgamma(1.0 - 0.5 * sigma) /
           (std::pow(2.0, sigma) * sigma * std::tgamma(0.5 * (1.0 + sigma)));
}

SymbolField::SymbolField(SpectralMeasure measure, double sigma)
    : measure_(std::move(measure)), sigma_(sigma), c_sigma_(stable_constant(sigma)),
      lambda_(measure_.ellipticity(sigma)) {
    const int dim = measure_.dim();
    if (!measure_.density().empty() && dim <= 3) {
        use_cache_ = true;
        if (dim == 1) {
            const double e1 = 1.0;
            cache1d_ = density_part(&e1);
        } else if (dim == 2) {
            cache_nphi_ = 4096;
            cache_.resize(cache_nphi_);
            parallel_for(static_cast<std::int64_t>(cache_nphi_), [&](std::int64_t i) {
                const double phi = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(cache_nphi_);
                const double z[2] = {std::cos(phi), std::sin(phi)};
                cache_[static_cast<std::size_t>(i)] = density_part(z);
            });
        } else {
            cache_ntheta_ = 129;
            cache_nphi_ = 256;
            cache_.resize(cache_ntheta_ * cache_nphi_);
            parallel_for(static_cast<std::int64_t>(cache_ntheta_ * cache_nphi_), [&](std::int64_t idx) {
                const std::size_t it = static_cast<std::size_t>(idx) / cache_nphi_;
                const std::size_t ip = static_cast<std::size_t>(idx) % cache_nphi_;
                const double th = kPi * static_cast<double>(it) / static_cast<double>(cache_ntheta_ - 1);
                const double ph = 2.0 * kPi * static_cast<double>(ip) / static_cast<double>(cache_nphi_);
                const double z[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
                cache_[static_cast<std::size_t>(idx)] = density_part(z);
            });
        }
    }

    // Two-sided bound λ c_σ <= g <= Λ c_σ, verified with exact evaluation
    // over the direction grid.
    const SphereRule rule = sphere_rule(dim);
    const double lo = lambda_ * c_sigma_ * (1.0 - 1e-9);
    const double hi = measure_.total_mass() * c_sigma_ * (1.0 + 1e-9);
    for (std::size_t i = 0; i < rule.count(); ++i) {
        const double val = c_sigma_ * directional_moment(measure_, rule.dir(i), sigma_);
        if (val < lo || val > hi) {
            std::ostringstream os;
            os << "SymbolField: angular factor " << val << " escapes [" << lo << ", " << hi
               << "] at grid node " << i;
            throw validation_error(os.str());
        }
    }
}

double SymbolField::density_part(const double* zeta) const {
    const int dim = measure_.dim();
    double s = 0.0;
    for (const auto& n : measure_.density()) {
        double d = 0.0;
        for (int k = 0; k < dim; ++k) d += zeta[k] * n.dir[k];
        s += n.value * n.qweight * std::pow(std::abs(d), sigma_);
    }
    return s;
}

double SymbolField::g_unchecked(const double* zeta) const {
    const int dim = measure_.dim();
    double s = 0.0;
    for (const auto& a : measure_.atoms()) {
        double d = 0.0;
        for (int k = 0; k < dim; ++k) d += zeta[k] * a.dir[k];
        s += a.weight * std::pow(std::abs(d), sigma_);
    }
    if (!measure_.density().empty()) {
        if (!use_cache_) {
            s += density_part(zeta);
        } else if (dim == 1) {
            s += cache1d_;
        } else if (dim == 2) {
            double phi = std::atan2(zeta[1], zeta[0]);
            if (phi < 0.0) phi += 2.0 * kPi;
            const double u = phi * static_cast<double>(cache_nphi_) / (2.0 * kPi);
            const std::size_t i0 = std::min(static_cast<std::size_t>(u), cache_nphi_ - 1);
            const double f = u - static_cast<double>(i0);
            const std::size_t i1 = (i0 + 1) % cache_nphi_;
            s += (1.0 - f) * cache_[i0] + f * cache_[i1];
        } else {
            const double z = std::min(1.0, std::max(-1.0, zeta[2]));
            const double th = std::acos(z);
            double ph = std::atan2(zeta[1], zeta[0]);
            if (ph < 0.0) ph += 2.0 * kPi;
            const double ut = th * static_cast<double>(cache_ntheta_ - 1) / kPi;
            const double up = ph * static_cast<double>(cache_nphi_) / (2.0 * kPi);
            std::size_t it = std::min(static_cast<std::size_t>(ut), cache_ntheta_ - 2);
            const double ft = ut - static_cast<double>(it);
            const std::size_t ip0 = std::min(static_cast<std::size_t>(up), cache_nphi_ - 1);
            const double fp = up - static_cast<double>(ip0);
            const std::size_t ip1 = (ip0 + 1) % cache_nphi_;
            const double g00 = cache_[it * cache_nphi_ + ip0];
            const double g01 = cache_[it * cache_nphi_ + ip1];
            const double g10 = cache_[(it + 1) * cache_nphi_ + ip0];
            const double g11 = cache_[(it + 1) * cache_nphi_ + ip1];
            s += (1.0 - ft) * ((1.0 - fp) * g00 + fp * g01) + ft * ((1.0 - fp) * g10 + fp * g11);
        }
    }
    return c_sigma_ * s;
}

double SymbolField::g(const double* zeta) const {
    double n2 = 0.0;
    for (int d = 0; d < measure_.dim(); ++d) n2 += zeta[d] * zeta[d];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "g: direction is not unit (|zeta| = " << std::sqrt(n2) << ")";
        throw validation_error(os.str());
    }
    return g_unchecked(zeta);
}

double SymbolField::m(const double* xi) const {
    const int dim = measure_.dim();
    double n2 = 0.0;
    for (int d = 0; d < dim; ++d) n2 += xi[d] * xi[d];
    if (n2 == 0.0) return 0.0;
    const double r = std::sqrt(n2);
    double stack[8];
    std::vector<double> heap;
    double* zeta = stack;
    if (dim > 8) {
        heap.resize(static_cast<std::size_t>(dim));
        zeta = heap.data();
    }
    for (int d = 0; d < dim; ++d) zeta[d] = xi[d] / r;
    return std::pow(r, sigma_) * g_unchecked(zeta);
}

} // namespace aniso_heat
