#pragma once

#include "aniso_heat/kernel.hpp"

#include <functional>
#include <vector>

namespace aniso_heat {

/// Coordinate-block partition (n_1, ..., n_M), Σ n_k = N, for operators that
/// split as sums of fractional Laplacians on the blocks.
struct BlockPartition {
    std::vector<int> blocks;
    double sigma = 1.0;

    int total_dim() const;
    void validate() const;
};

/// Profile assembled from per-block factors: Φ(x) = Π_k Ψ_k(x^k), with LΦ,
/// L²Φ and the gradients combined through the quotient formulas
/// (LΦ = Φ Σ L_kΨ_k/Ψ_k and its derivatives). Factors are built by
/// build_profile in their own (typically much larger) boxes; every axis of
/// the assembled grid must land exactly on factor grid nodes.
struct ProductProfile {
    BlockPartition partition;
    std::vector<KernelProfile> factors;
    KernelProfile assembled;
};

/// Build the factors and assemble them on `assembled_grid`. When
/// `factor_grids` is empty every block of dimension n_k gets
/// (n = 65536, box = 16·assembled box) for n_k = 1 and the assembled grid
/// itself for n_k >= 2.
ProductProfile product_profile(const BlockPartition& partition, const SpatialGrid& assembled_grid,
                               const std::vector<SpatialGrid>& factor_grids = {});

/// σ = 1 closed form Ψ_n(w) = d_n (1+|w|²)^{-(n+1)/2}, d_n forced by unit
/// mass. Returns the radial evaluator; the constant is d_n().
struct ClosedFormCauchy {
    int block_dim = 1;
    double d_n = 0.0;
    double operator()(double radius) const;
};
ClosedFormCauchy closed_form_sigma1(int block_dim, double sigma);

/// max over the inner half-box of max(|LΦ|, |∇Φ|, |∇LΦ|) / Φ.
double gradient_ratio_bound(const KernelProfile& profile);

} // namespace aniso_heat
