#include "aniso_heat/sphere.hpp"

#include "aniso_heat/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace aniso_heat {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sphere_surface(int dim) {
    if (dim < 1) throw validation_error("sphere_surface: dimension must be >= 1");
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2); the N = 1 value is the counting measure of {±1}.
    return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

std::size_t default_sphere_nodes(int dim) {
    switch (dim) {
        case 1: return 2;
        case 2: return 4096;
        case 3: return 8192;
        default: return 8192;
    }
}

SphereRule sphere_rule(int dim, std::size_t nodes) {
    if (dim < 1) throw validation_error("sphere_rule: dimension must be >= 1");
    if (nodes == 0) nodes = default_sphere_nodes(dim);

    SphereRule rule;
    rule.dim = dim;

    if (dim == 1) {
        rule.dirs = {1.0, -1.0};
        rule.weights = {1.0, 1.0};
        return rule;
    }

    if (dim == 2) {
        rule.dirs.resize(2 * nodes);
        rule.weights.assign(nodes, 2.0 * kPi / static_cast<double>(nodes));
        for (std::size_t i = 0; i < nodes; ++i) {
            const double phi = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(nodes);
            rule.dirs[2 * i] = std::cos(phi);
            rule.dirs[2 * i + 1] = std::sin(phi);
        }
        return rule;
    }

    if (dim == 3) {
        // Fibonacci sphere: near-uniform node placement, equal weights.
        rule.dirs.resize(3 * nodes);
        rule.weights.assign(nodes, 4.0 * kPi / static_cast<double>(nodes));
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(nodes);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * kPi * static_cast<double>(i) / golden;
            rule.dirs[3 * i] = rho * std::cos(phi);
            rule.dirs[3 * i + 1] = rho * std::sin(phi);
            rule.dirs[3 * i + 2] = z;
        }
        return rule;
    }

    // N >= 4: deterministic Gaussian directions, equal weights.
    std::mt19937_64 rng(0x5EEDD1CEuLL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    rule.dirs.resize(static_cast<std::size_t>(dim) * nodes);
    rule.weights.assign(nodes, sphere_surface(dim) / static_cast<double>(nodes));
    for (std::size_t i = 0; i < nodes; ++i) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double g = gauss(rng);
                rule.dirs[i * dim + d] = g;
                norm2 += g * g;
            }
        } while (norm2 < 1e-12);
        const double inv = 1.0 / std::sqrt(norm2);
        for (int d = 0; d < dim; ++d) rule.dirs[i * dim + d] *= inv;
    }
    return rule;
}

} // namespace aniso_heat
