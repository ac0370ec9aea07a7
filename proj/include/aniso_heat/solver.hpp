#pragma once

#include "aniso_heat/fields.hpp"
#include "aniso_heat/kernel.hpp"

#include <optional>
#include <vector>

namespace aniso_heat {

/// Spectral application of L: inverse transform of m(ξ)·field̂(ξ). Linear,
/// annihilates constants.
std::vector<double> apply_operator(const SymbolField& symbol, const SpatialGrid& grid,
                                   const std::vector<double>& field);

/// Carré du champ E(v,w) = v·Lw + w·Lv − L(vw) (three operator applications).
std::vector<double> carre_du_champ(const SymbolField& symbol, const SpatialGrid& grid,
                                   const std::vector<double>& v, const std::vector<double>& w);

/// u(·,t) = inverse transform of e^{-t m} û₀ on the profile grid, one slice
/// per requested time. Mass is conserved (m(0) = 0).
SpaceTimeField solve_homogeneous(const KernelProfile& profile, const std::vector<double>& u0,
                                 const std::vector<double>& times);

/// L^p norm on the grid ((Σ|u|^p h^N)^{1/p}; p = infinity for the sup).
double lp_norm(const SpatialGrid& grid, const std::vector<double>& field, double p);

/// Fitted log-log slope of ‖u(t)‖_q over the ladder, for u solving the
/// homogeneous problem from u0 ∈ L^p. Requires 1 <= p <= q (infinity as a
/// value is accepted).
double smoothing_exponent(const KernelProfile& profile, const std::vector<double>& u0, double p,
                          double q, const std::vector<double>& times);

/// Principal-value parameters for the forced solve. The exclusion ladder is
/// expressed as decreasing fractions of the σ-parabolic radius R = t^{1/σ}
/// of each target (the singular geometry scales with the target time).
struct PvParams {
    std::vector<double> eps_fractions = {0.125, 0.0625, 0.03125, 0.015625};
    int s_nodes = 96;          // log-mapped nodes for the s integral
    int rho_nodes = 24;        // nodes per ladder segment of the inner ρ integral
    int head_rho_nodes = 48;   // nodes for the inner segment down to ε₀
    int outer_rho_nodes = 48;  // log-mapped nodes for the outer ρ integral
    int theta_nodes = 0;       // 0: dimension default (2 / 128 / 512)
    /// Kernel samples are taken for s up to this fraction of the grid box;
    /// beyond it the profile-identity counterterms take over. Zero picks a
    /// balance between tail truncation and box-periodization contamination
    /// of the samples (which grows with the cut).
    double s_cut_fraction = 0.0;
    bool richardson_check = true;

    void validate() const;
};

struct PvDiagnostics {
    std::int64_t targets = 0;
    std::int64_t rate_flagged = 0;  // extrapolation rate deviated from the α-predicted one
    double worst_ratio_deviation = 0.0;
};

/// Targets for the forced solve: a spatial lattice times a time ladder.
struct SolveTargets {
    SampleLattice lattice;
    std::vector<double> times;
};

/// Principal-value Duhamel solution of ∂_t u + Lu = Lf with u₀ ≡ 0:
/// u(x,t) = lim_{ε→0} ∫_{Ω_ε} LP(x-x̄, t-t̄) f(x̄,t̄). The integral is
/// evaluated in the (s,ρ,θ) variables adapted to the σ-parabolic scaling,
/// with f(x,t) subtracted from the integrand (the subtracted constant
/// integrates to zero by the cancellation identity and the zero mean of LΦ,
/// so constants are annihilated exactly); the excised remainder below the
/// smallest ladder radius is closed by Richardson extrapolation at the
/// declared Hölder rate. Throws convergence_error when the ladder ratios
/// leave [0.2, 5].
SpaceTimeField solve_forced(const KernelProfile& profile, const Forcing& forcing,
                            const PvParams& pv, const SolveTargets& targets,
                            PvDiagnostics* diagnostics = nullptr);

/// Smooth compactly supported test function with an analytic time
/// derivative, for the very weak formulation.
struct TestFunction {
    std::function<double(const double*, double)> value;
    std::function<double(const double*, double)> dt;
    double support_radius = 0.0; // spatial support: |x| < support_radius
    double t_end = 0.0;          // vanishes for t >= t_end
};

/// ζ(x,t) = bump(|x|/radius) · bump(t/t_end): nonzero at t = 0, vanishing
/// smoothly at |x| = radius and t = t_end.
TestFunction bump_test_function(int dim, double radius, double t_end);

/// |∫ u ∂_t ζ − ∫ (u−f) Lζ + ∫ u₀ ζ(·,0)| normalized by
/// ∫(|∂_tζ| + |Lζ|) + ∫|ζ(·,0)|. Quadrature: trapezoid over u's ladder and
/// lattice; Lζ is computed spectrally on the profile grid. f may be null
/// (≡ 0) and u0 empty (≡ 0; otherwise a field on the profile grid).
double very_weak_residual(const SpaceTimeField& u, const Forcing* forcing,
                          const std::vector<double>& u0, const TestFunction& zeta,
                          const KernelProfile& profile);

} // namespace aniso_heat
