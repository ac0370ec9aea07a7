#pragma once

#include "aniso_heat/fields.hpp"

#include <cstdint>
#include <vector>

namespace aniso_heat {

/// Space-time point carrying the σ-parabolic norm structure.
struct SigmaPoint {
    std::vector<double> x;
    double t = 0.0;
    double sigma = 1.0;
};

/// |Y|_σ = (|x|² + |t|^{2/σ})^{1/2}.
double sigma_norm(const double* x, int dim, double t, double sigma);
double sigma_norm(const SigmaPoint& y);
double sigma_distance(const double* x1, double t1, const double* x2, double t2, int dim,
                      double sigma);

struct HolderOptions {
    std::int64_t pair_budget = 200000;
    std::uint64_t seed = 20250810;
    /// Restrict the sampling to pairs at σ-distance >= this value.
    double min_distance = 0.0;
};

/// Sampled estimate of the C^α_σ seminorm of a gridded space-time field:
/// the max of |u(Y₁)-u(Y₂)| / |Y₁-Y₂|_σ^α over a deterministic quasi-random
/// pair sample stratified over dyadic distance bands (from twice the grid
/// spacing up to the domain diameter). A lower bound of the supremum;
/// stability under refinement is the meaningful acceptance signal.
double holder_seminorm(const SpaceTimeField& field, double alpha,
                       const HolderOptions& options = {});

} // namespace aniso_heat
