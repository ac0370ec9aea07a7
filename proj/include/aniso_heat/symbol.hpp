#pragma once

#include "aniso_heat/spectral_measure.hpp"

#include <vector>

namespace aniso_heat {

/// c_σ = ∫_0^∞ (1 - cos t) t^{-1-σ} dt = √π Γ(1-σ/2) / (2^σ σ Γ((1+σ)/2)).
/// The defining integral depends only on σ; throws for σ outside (0,2).
double stable_constant(double sigma);

/// Fourier multiplier m(ξ) = |ξ|^σ g(ξ/|ξ|) of the stable operator, with
/// g(ζ) = c_σ ∫ |ζ·θ|^σ dμ(θ). Atoms are summed exactly at every
/// evaluation; the density part is precomputed on a direction grid and
/// linearly interpolated (N = 2, 3). Immutable and reentrant.
class SymbolField {
public:
    SymbolField(SpectralMeasure measure, double sigma);

    const SpectralMeasure& measure() const { return measure_; }
    int dim() const { return measure_.dim(); }
    double sigma() const { return sigma_; }
    double c_sigma() const { return c_sigma_; }
    /// Ellipticity constant λ of the measure (positive; checked at build).
    double lambda() const { return lambda_; }
    double mass() const { return measure_.total_mass(); }

    /// Angular factor g(ζ); ζ must be unit within 1e-12.
    double g(const double* zeta) const;

    /// m(ξ); m(0) = 0 exactly, homogeneous of order σ by construction.
    double m(const double* xi) const;

private:
    double g_unchecked(const double* zeta) const;
    double density_part(const double* zeta) const;

    SpectralMeasure measure_;
    double sigma_;
    double c_sigma_;
    double lambda_;

    // Density-part cache. N = 1: single value; N = 2: uniform angle table;
    // N = 3: latitude/longitude table with wrapped bilinear interpolation.
    bool use_cache_ = false;
    double cache1d_ = 0.0;
    std::vector<double> cache_;
    std::size_t cache_nphi_ = 0;
    std::size_t cache_ntheta_ = 0;
};

} // namespace aniso_heat
