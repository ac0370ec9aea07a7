#pragma once

#include "aniso_heat/fft.hpp"
#include "aniso_heat/grid.hpp"
#include "aniso_heat/sphere.hpp"
#include "aniso_heat/symbol.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace aniso_heat {

/// Gridded components of the self-similar heat-kernel profile.
enum class KernelComponent {
    phi,
    lphi,
    l2phi,
    abs_lphi,
    abs_l2phi,
    dr_phi,
    dr_lphi,
    abs_dr_phi,
    abs_dr_lphi,
};

/// Profile Φ of the kernel P(x,t) = t^{-N/σ} Φ(x t^{-1/σ}), together with
/// LΦ, L²Φ and the spectrally computed gradients ∇Φ, ∇LΦ on a truncated
/// box. Fields are periodizations of the true profile over the box lattice;
/// quantitative work should stay inside the trusted region |x| <= 0.8 Lx.
/// Immutable after construction; evaluators are pure.
struct KernelProfile {
    SpatialGrid grid;
    SymbolField symbol;
    std::vector<double> phi;
    std::vector<double> lphi;
    std::vector<double> l2phi;
    std::array<std::vector<double>, 3> grad;   // ∂_d Φ
    std::array<std::vector<double>, 3> grad_l; // ∂_d LΦ
    std::vector<double> multiplier;            // m(ξ) on the DFT frequency lattice

    double max_phi = 0.0;
    double mass = 0.0; // Σ Φ h^N

    int dim() const { return grid.dim; }
    double trusted_radius() const { return 0.8 * grid.box; }

    /// Interpolated component value at a spatial point.
    double eval(KernelComponent comp, const double* x) const;
};

/// Synthesize the profile by Fourier inversion of e^{-m}. Throws when the
/// frequency box cannot resolve the spectrum (grid too coarse) and when the
/// resulting fields violate the profile invariants (unit mass, positivity,
/// boundedness).
KernelProfile build_profile(const SymbolField& symbol, const SpatialGrid& grid);

/// Smallest power-of-two n satisfying the resolution guard
/// e^{-λ c_σ (π/h)^σ} < 1e-14 at the given box half-width.
int required_grid_n(const SymbolField& symbol, double box);

/// P(x,t) = t^{-N/σ} Φ(x t^{-1/σ}) by grid interpolation; throws range_error
/// when the rescaled point leaves the box.
double heat_kernel_eval(const KernelProfile& profile, const double* x, double t);

/// ∫_{S^{N-1}} component(rθ) dθ by sphere quadrature (counting measure for
/// N = 1, so the surface of S^0 is 2).
double spherical_average(const KernelProfile& profile, KernelComponent comp, double r);

/// Least-squares slope of log(spherical average) vs log r over a geometric
/// ladder. Sign-changing averages raise an error advising the |·| component.
double decay_slope(const KernelProfile& profile, KernelComponent comp, double r_min, double r_max,
                   int num_r);

/// Same fit along a fixed ray r·dir instead of the spherical average.
double directional_slope(const KernelProfile& profile, KernelComponent comp, const double* dir,
                         double r_min, double r_max, int num_r);

struct CancellationResult {
    double integral = 0.0;     // ∫_{B+_{a,b}} LP
    double abs_integral = 0.0; // ∫_{B+_{a,b}} |LP|
};

/// Space-time integral of LP over the σ-parabolic half-annulus
/// {a < |Y|_σ < b, t > 0}, via the (s,ρ) change of variables with a
/// tensor-product Gauss-Legendre rule, plus a fitted power-law closure of
/// the s-tail beyond the trusted radius. Also returns the companion
/// integral of |LP| for normalization.
CancellationResult cancellation_integral(const KernelProfile& profile, double a, double b,
                                         int s_nodes = 256, int rho_nodes = 256,
                                         double s_max_fraction = 0.25);

/// sup over the inner half-box of |σ LΦ - N Φ - r ∂_r Φ| / max Φ, with the
/// radial derivative taken from the spectral gradient.
double profile_equation_residual(const KernelProfile& profile);

/// ∫_{S^{N-1}} |LΦ(rθ) - LΦ(rθ - sφ)| dθ.
double shifted_average_difference(const KernelProfile& profile, double r, double s,
                                  const double* phi_dir);

/// CSV export (coordinates, phi, lphi, l2phi); stride decimates each axis.
void export_csv(const KernelProfile& profile, std::ostream& os, int stride = 1);

/// Binary cache ("ANHK1", little-endian doubles, dimensions then flattened
/// row-major arrays).
void save_binary(const KernelProfile& profile, const std::string& path);

/// Reload a cache written by save_binary; the symbol is rebuilt by the
/// caller and validated against the stored grid metadata.
KernelProfile load_binary(const std::string& path, const SymbolField& symbol);

} // namespace aniso_heat
