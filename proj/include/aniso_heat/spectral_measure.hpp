#pragma once

#include "aniso_heat/sphere.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <vector>

namespace aniso_heat {

/// Finite nonnegative measure on the unit sphere S^{N-1}: a list of atoms
/// plus an optional gridded density (value times quadrature weight per node).
/// Immutable after construction; all member functions are const and
/// reentrant.
class SpectralMeasure {
public:
    struct Atom {
        std::vector<double> dir;
        double weight = 0.0;
    };
    struct DensityNode {
        std::vector<double> dir;
        double value = 0.0;   // density value at the node
        double qweight = 0.0; // sphere quadrature weight
    };

    SpectralMeasure(int dim, std::vector<Atom> atoms, std::vector<DensityNode> density);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityNode>& density() const { return density_; }

    /// Total mass Λ = Σ atom weights + Σ density·qweight.
    double total_mass() const { return mass_; }

    /// ∫ f(θ) dμ(θ); atoms summed exactly, density by its quadrature rule.
    double integrate(const std::function<double(const double*)>& f) const;

    /// Ellipticity λ = min over a dense direction grid (with local
    /// refinement) of ∫ |ζ·θ|^σ dμ(θ). Throws validation_error when the
    /// minimum falls below 1e-10·Λ (measure supported in a proper subspace).
    double ellipticity(double sigma) const;

    /// Grid minimum without the degeneracy check (used by diagnostics).
    double ellipticity_unchecked(double sigma) const;

private:
    int dim_;
    std::vector<Atom> atoms_;
    std::vector<DensityNode> density_;
    double mass_ = 0.0;
};

/// ∫ |ζ·θ|^σ dμ(θ) for one direction ζ.
double directional_moment(const SpectralMeasure& mu, const double* zeta, double sigma);

/// Build a measure from its JSON description:
///   {"dimension": N,
///    "atoms": [{"direction": [...], "weight": w}, ...],
///    "density": {"kind": "isotropic"|"samples"|"sum-of-laplacians", ...}}
/// "isotropic" takes "value" (default 1) or "normalization": "unit-symbol"
/// to make the symbol exactly |ξ|^σ; "sum-of-laplacians" takes "blocks":
/// [n_1, ..., n_M] and produces the measure whose symbol is Σ_k |ξ^k|^σ.
/// σ enters only through those normalizations.
SpectralMeasure measure_from_spec(const nlohmann::json& spec, double sigma);

} // namespace aniso_heat
