#include "aniso_heat/solver.hpp"

#include "aniso_heat/parallel.hpp"
#include "aniso_heat/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <sstream>

namespace aniso_heat {

namespace {

void decode_indices(std::int64_t idx, int dim, int n, int* k) {
    for (int d = dim - 1; d >= 0; --d) {
        k[d] = static_cast<int>(idx % n);
        idx /= n;
    }
}

std::vector<double> sampled_multiplier(const SymbolField& symbol, const SpatialGrid& grid) {
    const std::int64_t size = grid.size();
    std::vector<double> m(static_cast<std::size_t>(size));
    parallel_for(size, [&](std::int64_t idx) {
        int k[3];
        decode_indices(idx, grid.dim, grid.n, k);
        double xi[3];
        for (int d = 0; d < grid.dim; ++d) xi[d] = grid.freq(k[d]);
        m[static_cast<std::size_t>(idx)] = symbol.m(xi);
    });
    return m;
}

} // namespace

std::vector<double> apply_operator(const SymbolField& symbol, const SpatialGrid& grid,
                                   const std::vector<double>& field) {
    if (static_cast<std::int64_t>(field.size()) != grid.size())
        throw validation_error("apply_operator: field size does not match grid");
    const std::int64_t size = grid.size();
    const std::vector<double> m = sampled_multiplier(symbol, grid);
    std::vector<std::complex<double>> ws(field.begin(), field.end());
    fft::forward(grid, ws);
    const double inv = 1.0 / static_cast<double>(size);
    parallel_for(size, [&](std::int64_t idx) {
        ws[static_cast<std::size_t>(idx)] *= m[static_cast<std::size_t>(idx)] * inv;
    });
    fft::backward(grid, ws);
    std::vector<double> out(static_cast<std::size_t>(size));
    parallel_for(size, [&](std::int64_t idx) {
        out[static_cast<std::size_t>(idx)] = ws[static_cast<std::size_t>(idx)].real();
    });
    return out;
}

std::vector<double> carre_du_champ(const SymbolField& symbol, const SpatialGrid& grid,
                                   const std::vector<double>& v, const std::vector<double>& w) {
    if (v.size() != w.size()) throw validation_error("carre_du_champ: field sizes differ");
    std::vector<double> vw(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) vw[i] = v[i] * w[i];
    const std::vector<double> lv = apply_operator(symbol, grid, v);
    const std::vector<double> lw = apply_operator(symbol, grid, w);
    const std::vector<double> lvw = apply_operator(symbol, grid, vw);
    std::vector<double> e(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) e[i] = v[i] * lw[i] + w[i] * lv[i] - lvw[i];
    return e;
}

SpaceTimeField solve_homogeneous(const KernelProfile& profile, const std::vector<double>& u0,
                                 const std::vector<double>& times) {
    const SpatialGrid& grid = profile.grid;
    if (static_cast<std::int64_t>(u0.size()) != grid.size())
        throw validation_error("solve_homogeneous: u0 size does not match grid");
    if (times.empty()) throw validation_error("solve_homogeneous: empty time ladder");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
            throw validation_error("solve_homogeneous: times must be nonnegative and increasing");
    }

    const std::int64_t size = grid.size();
    const std::vector<double>& m = profile.multiplier;
    std::vector<std::complex<double>> u0hat(u0.begin(), u0.end());
    fft::forward(grid, u0hat);

    SpaceTimeField out;
    out.sigma = profile.symbol.sigma();
    out.provenance = "solution";
    out.times = times;
    out.lattice.dim = grid.dim;
    for (int d = 0; d < grid.dim; ++d) {
        out.lattice.npts[d] = grid.n;
        out.lattice.min[d] = -grid.box;
        out.lattice.step[d] = grid.h();
    }
    out.values.resize(times.size() * static_cast<std::size_t>(size));

    std::vector<std::complex<double>> ws(static_cast<std::size_t>(size));
    const double inv = 1.0 / static_cast<double>(size);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        parallel_for(size, [&](std::int64_t idx) {
            const std::size_t u = static_cast<std::size_t>(idx);
            ws[u] = u0hat[u] * (std::exp(-t * m[u]) * inv);
        });
        fft::backward(grid, ws);
        double* slice = out.values.data() + ti * static_cast<std::size_t>(size);
        parallel_for(size, [&](std::int64_t idx) {
            slice[idx] = ws[static_cast<std::size_t>(idx)].real();
        });
    }
    return out;
}

double lp_norm(const SpatialGrid& grid, const std::vector<double>& field, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : field) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw validation_error("lp_norm: p must be >= 1");
    double acc = 0.0;
    for (double v : field) acc += std::pow(std::abs(v), p);
    return std::pow(acc * std::pow(grid.h(), grid.dim), 1.0 / p);
}

double smoothing_exponent(const KernelProfile& profile, const std::vector<double>& u0, double p,
                          double q, const std::vector<double>& times) {
    if (p > q) throw validation_error("smoothing_exponent: need p <= q");
    if (!(p >= 1.0)) throw validation_error("smoothing_exponent: need p >= 1");
    const SpaceTimeField u = solve_homogeneous(profile, u0, times);
    std::vector<double> lx, ly;
    const std::int64_t size = profile.grid.size();
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        std::vector<double> slice(u.values.begin() + ti * static_cast<std::size_t>(size),
                                  u.values.begin() + (ti + 1) * static_cast<std::size_t>(size));
        const double nq = lp_norm(profile.grid, slice, q);
        if (!(nq > 0.0)) throw convergence_error("smoothing_exponent: vanishing norm in ladder");
        lx.push_back(std::log(times[ti]));
        ly.push_back(std::log(nq));
    }
    return lsq_slope(lx, ly);
}

void PvParams::validate() const {
    if (eps_fractions.empty()) throw validation_error("PvParams: empty exclusion ladder");
    double ratio = 0.0;
    for (std::size_t i = 0; i < eps_fractions.size(); ++i) {
        const double f = eps_fractions[i];
        if (!(f > 0.0 && f < 1.0))
            throw validation_error("PvParams: ladder fractions must lie in (0,1)");
        if (i > 0) {
            if (!(f < eps_fractions[i - 1]))
                throw validation_error("PvParams: ladder must be strictly decreasing");
            const double r = f / eps_fractions[i - 1];
            if (ratio == 0.0) ratio = r;
            else if (std::abs(r - ratio) > 1e-9)
                throw validation_error("PvParams: ladder must be geometric");
        }
    }
    if (s_nodes < 8 || rho_nodes < 4 || head_rho_nodes < 4 || outer_rho_nodes < 8)
        throw validation_error("PvParams: too few quadrature nodes");
    if (s_cut_fraction != 0.0 && !(s_cut_fraction > 0.0 && s_cut_fraction <= 0.8))
        throw validation_error("PvParams: s_cut_fraction must lie in (0, 0.8] (or 0 = automatic)");
}

namespace {

int default_theta_nodes(int dim) {
    switch (dim) {
        case 1: return 2;
        case 2: return 128;
        default: return 512;
    }
}

/// Target-independent quadrature geometry and kernel samples for the PV
/// Duhamel integral in the (s, ρ, θ) variables. The reduced integrand is
///   σ s^{N-1} LΦ(sθ) · (f(x - r θ, t - τ) - f(x,t)) / ρ,
/// with r = ρ s (s²+1)^{-1/2} and τ = ρ^σ (s²+1)^{-σ/2}; the s-range beyond
/// the clean part of the grid is closed by the counterterm
/// -S^N Φ(Sθ) (f(x - ρθ, t) - f(x,t)) obtained from the radial form of the
/// profile equation.
struct PvContext {
    int dim;
    double sigma;
    SphereRule theta;
    double s_cut; // S

    // s-quadrature (shared by inner and every outer node above its smin)
    struct SAxis {
        std::vector<double> c1;     // s (s²+1)^{-1/2}
        std::vector<double> c2;     // (s²+1)^{-σ/2}
        std::vector<double> coeff;  // σ s^N w_u · LΦ(sθ), flattened [theta][node]
    };
    SAxis inner_s;
    std::vector<double> counterterm; // -S^N Φ(Sθ) w_θ, per θ

    // inner ρ ladder segments, as Gauss rules in w = ln(R/ρ)
    std::vector<GaussRule> inner_segments;

    // outer ρ nodes: v = ln(ρ/R) with per-node s-axes
    GaussRule outer_v;
    std::vector<SAxis> outer_s;

    // far-outer closure, ρ beyond the reach of the gridded s-range: the
    // whole s-integral collapses to -smin^N Φ(smin θ) (radial profile
    // identity) with Φ's tail carried by the amplitude S^{N+σ} Φ(Sθ).
    GaussRule far_v; // nodes in ln(ρ/R) beyond the outer range
    std::vector<double> far_amplitude; // w_θ S^{N+σ} Φ(Sθ), per θ

    const Forcing* f = nullptr;
};

PvContext make_pv_context(const KernelProfile& profile, const Forcing& forcing,
                          const PvParams& pv) {
    PvContext ctx;
    ctx.dim = profile.dim();
    ctx.sigma = profile.symbol.sigma();
    ctx.theta = sphere_rule(ctx.dim, static_cast<std::size_t>(
                                         pv.theta_nodes > 0 ? pv.theta_nodes
                                                            : default_theta_nodes(ctx.dim)));
    if (pv.s_cut_fraction > 0.0) {
        ctx.s_cut = pv.s_cut_fraction * profile.grid.box;
    } else {
        // The image leakage of the periodized LΦ samples is flat in s while
        // the integrand weight grows like s, so the sampled range stops at
        // box/32 (never above box/4, never below 10 when the box allows).
        const double box = profile.grid.box;
        ctx.s_cut = std::min(0.25 * box, std::max(10.0, box / 32.0));
    }
    ctx.f = &forcing;

    const double sigma = ctx.sigma;
    const std::size_t nth = ctx.theta.count();

    auto build_s_axis = [&](double s_lo, double s_hi, int nodes) {
        PvContext::SAxis ax;
        const GaussRule gl = gauss_legendre_on(nodes, std::log(s_lo), std::log(s_hi));
        const std::size_t ns = gl.nodes.size();
        ax.c1.resize(ns);
        ax.c2.resize(ns);
        ax.coeff.resize(nth * ns);
        double p[3];
        for (std::size_t j = 0; j < ns; ++j) {
            const double s = std::exp(gl.nodes[j]);
            ax.c1[j] = s / std::sqrt(s * s + 1.0);
            ax.c2[j] = std::pow(s * s + 1.0, -0.5 * sigma);
            const double base = sigma * std::pow(s, ctx.dim) * gl.weights[j];
            for (std::size_t q = 0; q < nth; ++q) {
                const double* dir = ctx.theta.dir(q);
                for (int d = 0; d < ctx.dim; ++d) p[d] = s * dir[d];
                ax.coeff[q * ns + j] =
                    base * ctx.theta.weights[q] *
                    grid_interpolate(profile.grid, profile.lphi, p);
            }
        }
        return ax;
    };

    ctx.inner_s = build_s_axis(1e-6, ctx.s_cut, pv.s_nodes);

    ctx.counterterm.resize(nth);
    {
        double p[3];
        const double sn = std::pow(ctx.s_cut, ctx.dim);
        for (std::size_t q = 0; q < nth; ++q) {
            const double* dir = ctx.theta.dir(q);
            for (int d = 0; d < ctx.dim; ++d) p[d] = ctx.s_cut * dir[d];
            ctx.counterterm[q] = -ctx.theta.weights[q] * sn *
                                 grid_interpolate(profile.grid, profile.phi, p);
        }
    }

    // Inner ladder segments in w = ln(R/ρ): [0, w₀], [w₀, w₁], ...
    double w_prev = 0.0;
    for (std::size_t i = 0; i < pv.eps_fractions.size(); ++i) {
        const double w_i = -std::log(pv.eps_fractions[i]);
        const int nodes = (i == 0) ? pv.head_rho_nodes : pv.rho_nodes;
        ctx.inner_segments.push_back(gauss_legendre_on(nodes, w_prev, w_i));
        w_prev = w_i;
    }

    // Outer ρ range: v up to where smin reaches 0.9 S.
    const double smin_hi = 0.9 * ctx.s_cut;
    const double vmax = 0.5 * std::log1p(smin_hi * smin_hi);
    ctx.outer_v = gauss_legendre_on(pv.outer_rho_nodes, 0.0, vmax);
    ctx.outer_s.reserve(ctx.outer_v.nodes.size());
    for (double v : ctx.outer_v.nodes) {
        const double rho_over_r = std::exp(v);
        const double smin = std::sqrt(std::max(0.0, rho_over_r * rho_over_r - 1.0));
        ctx.outer_s.push_back(build_s_axis(std::max(smin, 1e-6), ctx.s_cut, pv.s_nodes));
    }

    // Far-outer closure nodes: ln(ρ/R) from vmax out to where the slices
    // have decayed by e^{-12}.
    ctx.far_v = gauss_legendre_on(32, vmax, vmax + 12.0 / sigma);
    ctx.far_amplitude.resize(nth);
    {
        double p[3];
        const double amp = std::pow(ctx.s_cut, ctx.dim + sigma);
        for (std::size_t q = 0; q < nth; ++q) {
            const double* dir = ctx.theta.dir(q);
            for (int d = 0; d < ctx.dim; ++d) p[d] = ctx.s_cut * dir[d];
            ctx.far_amplitude[q] = ctx.theta.weights[q] * amp *
                                   grid_interpolate(profile.grid, profile.phi, p);
        }
    }

    return ctx;
}

struct PvPointResult {
    double value = 0.0;
    bool ladder_bad = false;
    bool rate_flagged = false;
    double ratio_deviation = 0.0;
};

PvPointResult pv_solve_point(const PvContext& ctx, const double* x, double t,
                             const PvParams& pv) {
    PvPointResult res;
    const int dim = ctx.dim;
    const double sigma = ctx.sigma;
    const Forcing& f = *ctx.f;
    const double R = std::pow(t, 1.0 / sigma);
    const double fY = f(x, t);
    const std::size_t nth = ctx.theta.count();

    double xb[3];

    // Δf-weighted sum over one s-axis at fixed ρ, plus the s-tail counterterm.
    auto rho_contribution = [&](const PvContext::SAxis& ax, double rho) {
        const std::size_t ns = ax.c1.size();
        const double rho_sigma = std::pow(rho, sigma);
        double acc = 0.0;
        for (std::size_t q = 0; q < nth; ++q) {
            const double* dir = ctx.theta.dir(q);
            const double* coeff = ax.coeff.data() + q * ns;
            double sum_q = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const double c = coeff[j];
                if (c == 0.0) continue;
                const double r = rho * ax.c1[j];
                double tb = t - rho_sigma * ax.c2[j];
                if (tb < 0.0) tb = 0.0;
                for (int d = 0; d < dim; ++d) xb[d] = x[d] - r * dir[d];
                sum_q += c * (f(xb, tb) - fY);
            }
            // Tail beyond S: the f-argument freezes at (x - ρθ, t).
            for (int d = 0; d < dim; ++d) xb[d] = x[d] - rho * dir[d];
            sum_q += ctx.counterterm[q] * (f(xb, t) - fY);
            acc += sum_q;
        }
        return acc;
    };

    // Outer region ρ > R (dρ/ρ = dv).
    double outer = 0.0;
    for (std::size_t vi = 0; vi < ctx.outer_v.nodes.size(); ++vi) {
        const double rho = R * std::exp(ctx.outer_v.nodes[vi]);
        outer += ctx.outer_v.weights[vi] * rho_contribution(ctx.outer_s[vi], rho);
    }
    // Far-outer closure: the s-range has collapsed; exact for constants.
    for (std::size_t vi = 0; vi < ctx.far_v.nodes.size(); ++vi) {
        const double rr = std::exp(ctx.far_v.nodes[vi]); // ρ / R
        const double rho = R * rr;
        const double smin = std::sqrt(std::max(rr * rr - 1.0, 1e-300));
        const double factor = -std::pow(smin, -sigma);
        double sum_q = 0.0;
        for (std::size_t q = 0; q < nth; ++q) {
            const double* dir = ctx.theta.dir(q);
            for (int d = 0; d < dim; ++d) xb[d] = x[d] - rho * dir[d];
            sum_q += ctx.far_amplitude[q] * (f(xb, t) - fY);
        }
        outer += ctx.far_v.weights[vi] * factor * sum_q;
    }

    // Inner ladder partial sums (dρ/ρ = -dw), giving u(ε_i).
    std::vector<double> partial(ctx.inner_segments.size());
    double acc = outer;
    for (std::size_t seg = 0; seg < ctx.inner_segments.size(); ++seg) {
        const GaussRule& gr = ctx.inner_segments[seg];
        double s = 0.0;
        for (std::size_t wi = 0; wi < gr.nodes.size(); ++wi) {
            const double rho = R * std::exp(-gr.nodes[wi]);
            s += gr.weights[wi] * rho_contribution(ctx.inner_s, rho);
        }
        acc += s;
        partial[seg] = acc;
    }

    // Richardson closure of the excised remainder at the declared rate.
    const double floor = 1e-9 * std::max(1.0, f.sup_norm);
    const std::size_t L = partial.size();
    double value = partial[L - 1];
    if (L >= 2) {
        const double d_last = partial[L - 1] - partial[L - 2];
        const double ratio_ladder =
            L >= 2 ? pv.eps_fractions[1] / pv.eps_fractions[0] : 0.5;
        const double q = std::pow(ratio_ladder, f.holder_alpha);
        if (std::abs(d_last) > floor) {
            if (L >= 3 && pv.richardson_check) {
                const double d_prev = partial[L - 2] - partial[L - 3];
                if (std::abs(d_prev) > floor) {
                    const double ratio = d_prev / d_last;
                    if (!(ratio >= 0.2 && ratio <= 5.0)) res.ladder_bad = true;
                    const double expected = 1.0 / q;
                    const double dev = std::abs(std::log2(std::abs(ratio) / expected));
                    res.ratio_deviation = dev;
                    if (dev > 1.0) res.rate_flagged = true;
                }
            }
            value += d_last * q / (1.0 - q);
        }
    }
    res.value = value;
    return res;
}

} // namespace

SpaceTimeField solve_forced(const KernelProfile& profile, const Forcing& forcing,
                            const PvParams& pv, const SolveTargets& targets,
                            PvDiagnostics* diagnostics) {
    pv.validate();
    if (targets.times.empty()) throw validation_error("solve_forced: empty target times");
    for (std::size_t i = 0; i < targets.times.size(); ++i) {
        if (targets.times[i] < 0.0 || (i > 0 && targets.times[i] <= targets.times[i - 1]))
            throw validation_error("solve_forced: target times must be nonnegative, increasing");
    }
    if (targets.lattice.dim != profile.dim())
        throw validation_error("solve_forced: target lattice dimension mismatch");

    const PvContext ctx = make_pv_context(profile, forcing, pv);

    SpaceTimeField out;
    out.sigma = profile.symbol.sigma();
    out.provenance = "solution";
    out.lattice = targets.lattice;
    out.times = targets.times;
    const std::int64_t npts = targets.lattice.size();
    const std::size_t nt = targets.times.size();
    out.values.assign(nt * static_cast<std::size_t>(npts), 0.0);

    std::vector<unsigned char> bad(nt * static_cast<std::size_t>(npts), 0);
    std::vector<unsigned char> flagged(nt * static_cast<std::size_t>(npts), 0);
    std::vector<double> deviation(nt * static_cast<std::size_t>(npts), 0.0);

    const std::int64_t total = static_cast<std::int64_t>(nt) * npts;
    parallel_for(total, [&](std::int64_t job) {
        const std::size_t ti = static_cast<std::size_t>(job / npts);
        const std::int64_t p = job % npts;
        const double t = targets.times[ti];
        if (t <= 0.0) return; // u(·,0) = 0 for the forced problem
        double x[3];
        targets.lattice.point(p, x);
        const PvPointResult r = pv_solve_point(ctx, x, t, pv);
        out.value(ti, p) = r.value;
        const std::size_t u = ti * static_cast<std::size_t>(npts) + static_cast<std::size_t>(p);
        bad[u] = r.ladder_bad ? 1 : 0;
        flagged[u] = r.rate_flagged ? 1 : 0;
        deviation[u] = r.ratio_deviation;
    });

    PvDiagnostics diag;
    diag.targets = total;
    for (std::size_t u = 0; u < bad.size(); ++u) {
        if (flagged[u]) ++diag.rate_flagged;
        diag.worst_ratio_deviation = std::max(diag.worst_ratio_deviation, deviation[u]);
    }
    if (diagnostics) *diagnostics = diag;

    for (std::size_t u = 0; u < bad.size(); ++u) {
        if (bad[u]) {
            std::ostringstream os;
            os << "PV did not stabilize: ladder difference ratio outside [0.2, 5] at "
               << diag.rate_flagged << " flagged points (worst log2 rate deviation "
               << diag.worst_ratio_deviation << ")";
            throw convergence_error(os.str());
        }
    }
    return out;
}

TestFunction bump_test_function(int dim, double radius, double t_end) {
    if (!(radius > 0.0 && t_end > 0.0))
        throw validation_error("bump_test_function: radius and t_end must be positive");
    auto bump = [](double u) {
        const double u2 = u * u;
        return u2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u2)) : 0.0;
    };
    auto bump_dt = [](double u) { // d/du of bump
        const double u2 = u * u;
        if (u2 >= 1.0) return 0.0;
        const double den = 1.0 - u2;
        return std::exp(1.0 - 1.0 / den) * (-2.0 * u / (den * den));
    };
    TestFunction zeta;
    zeta.support_radius = radius;
    zeta.t_end = t_end;
    zeta.value = [dim, radius, t_end, bump](const double* x, double t) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        return bump(std::sqrt(r2) / radius) * bump(t / t_end);
    };
    zeta.dt = [dim, radius, t_end, bump, bump_dt](const double* x, double t) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        return bump(std::sqrt(r2) / radius) * bump_dt(t / t_end) / t_end;
    };
    return zeta;
}

double very_weak_residual(const SpaceTimeField& u, const Forcing* forcing,
                          const std::vector<double>& u0, const TestFunction& zeta,
                          const KernelProfile& profile) {
    u.validate();
    const SampleLattice& lat = u.lattice;
    for (int d = 0; d < lat.dim; ++d) {
        const double hi = lat.min[d] + lat.step[d] * (lat.npts[d] - 1);
        if (!(lat.min[d] <= -zeta.support_radius && hi >= zeta.support_radius))
            throw validation_error(
                "very_weak_residual: test function not compactly supported within the box");
    }
    if (zeta.support_radius >= profile.grid.box)
        throw validation_error("very_weak_residual: test function exceeds the profile grid box");
    if (zeta.t_end > u.times.back() + 1e-12)
        throw validation_error("very_weak_residual: test function does not vanish by the final time");

    // L ζ per time slice, computed spectrally on the profile grid.
    const SpatialGrid& grid = profile.grid;
    const std::int64_t gsize = grid.size();
    std::vector<double> zslice(static_cast<std::size_t>(gsize));
    const std::size_t nt = u.times.size();
    std::vector<std::vector<double>> lzeta(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double t = u.times[ti];
        parallel_for(gsize, [&](std::int64_t idx) {
            int k[3];
            decode_indices(idx, grid.dim, grid.n, k);
            double x[3];
            for (int d = 0; d < grid.dim; ++d) x[d] = grid.coord(k[d]);
            zslice[static_cast<std::size_t>(idx)] = zeta.value(x, t);
        });
        lzeta[ti] = apply_operator(profile.symbol, grid, zslice);
    }

    // Trapezoid weights over the ladder and the lattice.
    auto time_weight = [&](std::size_t ti) {
        if (nt == 1) return 1.0;
        if (ti == 0) return 0.5 * (u.times[1] - u.times[0]);
        if (ti == nt - 1) return 0.5 * (u.times[nt - 1] - u.times[nt - 2]);
        return 0.5 * (u.times[ti + 1] - u.times[ti - 1]);
    };
    double cellvol = 1.0;
    for (int d = 0; d < lat.dim; ++d) cellvol *= lat.step[d];

    const std::int64_t npts = lat.size();
    double term_dt = 0.0, term_l = 0.0, norm_dt = 0.0, norm_l = 0.0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double wt = time_weight(ti);
        const double t = u.times[ti];
        for (std::int64_t p = 0; p < npts; ++p) {
            double x[3];
            lat.point(p, x);
            double wx = 1.0;
            int iv[3];
            lat.decode(p, iv);
            for (int d = 0; d < lat.dim; ++d)
                if (iv[d] == 0 || iv[d] == lat.npts[d] - 1) wx *= 0.5;
            const double w = wt * wx * cellvol;
            const double uval = u.value(ti, p);
            const double dz = zeta.dt(x, t);
            const double lz = grid_interpolate(grid, lzeta[ti], x);
            const double fval = forcing ? (*forcing)(x, t) : 0.0;
            term_dt += w * uval * dz;
            term_l += w * (uval - fval) * lz;
            norm_dt += w * std::abs(dz);
            norm_l += w * std::abs(lz);
        }
    }

    double term_u0 = 0.0, norm_u0 = 0.0;
    if (!u0.empty()) {
        if (static_cast<std::int64_t>(u0.size()) != gsize)
            throw validation_error("very_weak_residual: u0 must live on the profile grid");
        const double hN = std::pow(grid.h(), grid.dim);
        for (std::int64_t idx = 0; idx < gsize; ++idx) {
            int k[3];
            decode_indices(idx, grid.dim, grid.n, k);
            double x[3];
            for (int d = 0; d < grid.dim; ++d) x[d] = grid.coord(k[d]);
            const double z0 = zeta.value(x, 0.0);
            term_u0 += u0[static_cast<std::size_t>(idx)] * z0 * hN;
            norm_u0 += std::abs(z0) * hN;
        }
    }

    const double norm = norm_dt + norm_l + norm_u0;
    if (!(norm > 0.0)) throw validation_error("very_weak_residual: vanishing test function");
    return std::abs(term_dt - term_l + term_u0) / norm;
}

} // namespace aniso_heat
