#pragma once

#include <cstddef>
#include <vector>

namespace aniso_heat {

/// Quadrature rule on the unit sphere S^{N-1}: directions plus weights that
/// sum to the surface measure |S^{N-1}| (counting measure 2 for N = 1).
struct SphereRule {
    int dim = 0;                       // ambient dimension N
    std::vector<double> dirs;          // node directions, row-major [count][N]
    std::vector<double> weights;

    std::size_t count() const { return weights.size(); }
    const double* dir(std::size_t i) const { return dirs.data() + i * static_cast<std::size_t>(dim); }
};

/// Default node counts: {±1} for N = 1, 4096 uniform angles for N = 2,
/// 8192 Fibonacci points for N = 3.
std::size_t default_sphere_nodes(int dim);

/// Build the quadrature rule for S^{N-1}. N = 1: two-point set; N = 2:
/// uniform angular grid (trapezoid, spectrally accurate for periodic
/// integrands); N = 3: Fibonacci sphere; N >= 4: seeded Gaussian directions
/// with equal weights (deterministic).
SphereRule sphere_rule(int dim, std::size_t nodes = 0);

/// Surface measure of S^{N-1} (2 for N = 1).
double sphere_surface(int dim);

} // namespace aniso_heat
