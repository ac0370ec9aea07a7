#pragma once

#include "aniso_heat/grid.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace aniso_heat {

/// Function of (x, t) sampled on a spatial lattice times an increasing time
/// ladder. values is indexed [time][space row-major].
struct SpaceTimeField {
    SampleLattice lattice;
    std::vector<double> times;
    std::vector<double> values;
    double sigma = 1.0;
    std::string provenance; // "input" | "solution" | "forcing"

    std::int64_t space_size() const { return lattice.size(); }
    double value(std::size_t time_index, std::int64_t space_index) const {
        return values[time_index * static_cast<std::size_t>(space_size()) +
                      static_cast<std::size_t>(space_index)];
    }
    double& value(std::size_t time_index, std::int64_t space_index) {
        return values[time_index * static_cast<std::size_t>(space_size()) +
                      static_cast<std::size_t>(space_index)];
    }

    void validate() const;

    /// Interpolated evaluation: multilinear in space (clamped at the lattice
    /// boundary), linear in t (clamped at the ladder ends).
    double eval(const double* x, double t) const;
};

/// Right-hand side datum f: a closed-form callable or a sampled field, with
/// its declared Hölder data (trusted, not re-verified).
struct Forcing {
    std::function<double(const double*, double)> fn;
    double holder_alpha = 1.0;
    double holder_seminorm = 1.0;
    double sup_norm = 1.0;
    std::string name;

    double operator()(const double* x, double t) const { return fn(x, t); }
};

Forcing forcing_constant(int dim, double value);
/// A e^{-|x-x0|^2 / w^2}, time-independent.
Forcing forcing_gaussian_bump(int dim, double amplitude, double width,
                              const std::vector<double>& center);
/// A sin(k x_1 - omega t): bounded, Lipschitz in the σ-parabolic metric.
Forcing forcing_sin_traveling(int dim, double amplitude, double wavenumber, double omega,
                              double sigma);
/// A max(0, 1 - |Y - Y0|_σ^α): bounded with exact Hölder-α cusp at Y0.
Forcing forcing_holder_cusp(int dim, double amplitude, double alpha, double sigma,
                            const std::vector<double>& center, double t_center);
/// Sampled forcing; off-grid evaluation by clamped interpolation.
Forcing forcing_from_field(SpaceTimeField field, double alpha, double seminorm);

/// CSV: header "t,x1[,x2[,x3]],u", one row per (time, lattice point).
void write_csv(const SpaceTimeField& field, std::ostream& os);
/// Parse the CSV back; rows must fill a regular lattice times a time ladder.
SpaceTimeField read_space_time_csv(std::istream& is, double sigma);

} // namespace aniso_heat
