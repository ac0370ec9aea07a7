#include "aniso_heat/kernel.hpp"

#include "aniso_heat/parallel.hpp"
#include "aniso_heat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace aniso_heat {

namespace {

constexpr double kGuardLog = 32.23619130191664; // ln(1e14)

void decode_indices(std::int64_t idx, int dim, int n, int* k) {
    for (int d = dim - 1; d >= 0; --d) {
        k[d] = static_cast<int>(idx % n);
        idx /= n;
    }
}

const SphereRule& average_rule(int dim) {
    static const SphereRule r1 = sphere_rule(1);
    static const SphereRule r2 = sphere_rule(2);
    static const SphereRule r3 = sphere_rule(3);
    switch (dim) {
        case 1: return r1;
        case 2: return r2;
        default: return r3;
    }
}

} // namespace

int required_grid_n(const SymbolField& symbol, double box) {
    const double lo = symbol.lambda() * symbol.c_sigma();
    const double h_needed = std::numbers::pi / std::pow(kGuardLog / lo, 1.0 / symbol.sigma());
    const double n_needed = 2.0 * box / h_needed;
    int n = 64;
    while (static_cast<double>(n) < n_needed) n *= 2;
    return n;
}

KernelProfile build_profile(const SymbolField& symbol, const SpatialGrid& grid) {
    grid.validate();
    if (symbol.dim() != grid.dim)
        throw validation_error("build_profile: symbol and grid dimensions differ");

    // Resolution guard: the sampled spectrum must have decayed below 1e-14
    // at the edge of the frequency box.
    const double lo = symbol.lambda() * symbol.c_sigma();
    if (lo * std::pow(grid.freq_max(), symbol.sigma()) < kGuardLog) {
        std::ostringstream os;
        os << "build_profile: grid too coarse, spectrum tail e^{-" << lo << " * "
           << grid.freq_max() << "^" << symbol.sigma() << "} >= 1e-14; need n >= "
           << required_grid_n(symbol, grid.box);
        throw validation_error(os.str());
    }

    const int dim = grid.dim;
    const int n = grid.n;
    const std::int64_t size = grid.size();
    const double scale = std::pow(1.0 / (static_cast<double>(n) * grid.h()), dim);

    // Sampled multiplier and spectrum, shared by every field below.
    std::vector<double> expm(static_cast<std::size_t>(size));
    parallel_for(size, [&](std::int64_t idx) {
        int k[3];
        decode_indices(idx, dim, n, k);
        double xi[3];
        for (int d = 0; d < dim; ++d) xi[d] = grid.freq(k[d]);
        expm[static_cast<std::size_t>(idx)] = symbol.m(xi);
    });
    std::vector<double> mgrid = expm;
    parallel_for(size, [&](std::int64_t idx) {
        expm[static_cast<std::size_t>(idx)] = std::exp(-expm[static_cast<std::size_t>(idx)]);
    });

    KernelProfile profile{grid, symbol, {}, {}, {}, {}, {}, {}, 0.0, 0.0};

    std::vector<std::complex<double>> ws(static_cast<std::size_t>(size));

    // Inverts factor(k) * e^{-m} with the (-1)^{Σk} twist that recenters the
    // box at the origin. grad_axis >= 0 multiplies by i ξ_d (Nyquist line
    // zeroed), mpow in {0,1,2} multiplies by m^mpow.
    auto synthesize = [&](int mpow, int grad_axis, std::vector<double>& out) {
        parallel_for(size, [&](std::int64_t idx) {
            int k[3];
            decode_indices(idx, dim, n, k);
            int parity = 0;
            for (int d = 0; d < dim; ++d) parity += k[d];
            const std::size_t u = static_cast<std::size_t>(idx);
            double amp = expm[u];
            if (mpow == 1) amp *= mgrid[u];
            else if (mpow == 2) amp *= mgrid[u] * mgrid[u];
            if (parity & 1) amp = -amp;
            if (grad_axis >= 0) {
                const double xi = (k[grad_axis] == n / 2) ? 0.0 : grid.freq(k[grad_axis]);
                ws[u] = std::complex<double>(0.0, xi * amp);
            } else {
                ws[u] = std::complex<double>(amp, 0.0);
            }
        });
        fft::backward(grid, ws);
        out.resize(static_cast<std::size_t>(size));
        parallel_for(size, [&](std::int64_t idx) {
            out[static_cast<std::size_t>(idx)] = ws[static_cast<std::size_t>(idx)].real() * scale;
        });
    };

    synthesize(0, -1, profile.phi);
    synthesize(1, -1, profile.lphi);
    synthesize(2, -1, profile.l2phi);
    for (int d = 0; d < dim; ++d) {
        synthesize(0, d, profile.grad[d]);
        synthesize(1, d, profile.grad_l[d]);
    }
    ws.clear();
    ws.shrink_to_fit();
    profile.multiplier = std::move(mgrid);

    // Invariants: unit mass, positivity, boundedness by the spectrum mass.
    const double hN = std::pow(grid.h(), dim);
    double mass = 0.0, maxp = 0.0, minp = profile.phi[0];
    {
        const std::int64_t block = 4096;
        std::vector<double> partial;
        for (std::int64_t lo_i = 0; lo_i < size; lo_i += block) {
            const std::int64_t hi_i = std::min(size, lo_i + block);
            double s = 0.0;
            for (std::int64_t i = lo_i; i < hi_i; ++i) {
                const double v = profile.phi[static_cast<std::size_t>(i)];
                s += v;
                maxp = std::max(maxp, v);
                minp = std::min(minp, v);
            }
            partial.push_back(s);
        }
        mass = deterministic_sum(partial) * hN;
    }
    profile.mass = mass;
    profile.max_phi = maxp;

    if (std::abs(mass - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "build_profile: profile mass " << mass << " deviates from 1 beyond 1e-6";
        throw convergence_error(os.str());
    }
    if (minp < -1e-8 * maxp) {
        std::ostringstream os;
        os << "build_profile: profile dips to " << minp << " (max " << maxp << ")";
        throw convergence_error(os.str());
    }
    double bound = 0.0;
    {
        const std::int64_t block = 4096;
        std::vector<double> partial;
        for (std::int64_t lo_i = 0; lo_i < size; lo_i += block) {
            const std::int64_t hi_i = std::min(size, lo_i + block);
            double s = 0.0;
            for (std::int64_t i = lo_i; i < hi_i; ++i) s += expm[static_cast<std::size_t>(i)];
            partial.push_back(s);
        }
        bound = deterministic_sum(partial) * scale;
    }
    if (maxp > bound + 1e-8) {
        std::ostringstream os;
        os << "build_profile: max Φ " << maxp << " exceeds spectrum bound " << bound;
        throw convergence_error(os.str());
    }
    // Strict positivity on the inner half-box.
    {
        double inner_min = maxp;
        const double half = 0.5 * grid.box;
        for (std::int64_t idx = 0; idx < size; ++idx) {
            int k[3];
            decode_indices(idx, dim, n, k);
            bool inner = true;
            for (int d = 0; d < dim; ++d)
                if (std::abs(grid.coord(k[d])) > half) inner = false;
            if (inner) inner_min = std::min(inner_min, profile.phi[static_cast<std::size_t>(idx)]);
        }
        if (!(inner_min > 0.0)) {
            std::ostringstream os;
            os << "build_profile: profile not strictly positive on the inner half-box (min "
               << inner_min << ")";
            throw convergence_error(os.str());
        }
    }

    return profile;
}

double KernelProfile::eval(KernelComponent comp, const double* x) const {
    switch (comp) {
        case KernelComponent::phi: return grid_interpolate(grid, phi, x);
        case KernelComponent::lphi: return grid_interpolate(grid, lphi, x);
        case KernelComponent::l2phi: return grid_interpolate(grid, l2phi, x);
        case KernelComponent::abs_lphi: return std::abs(grid_interpolate(grid, lphi, x));
        case KernelComponent::abs_l2phi: return std::abs(grid_interpolate(grid, l2phi, x));
        default: break;
    }
    // Radial-derivative variants.
    double r2 = 0.0;
    for (int d = 0; d < grid.dim; ++d) r2 += x[d] * x[d];
    const double r = std::sqrt(r2);
    if (r < 1e-300) return 0.0;
    const auto& fields = (comp == KernelComponent::dr_phi || comp == KernelComponent::abs_dr_phi)
                             ? grad
                             : grad_l;
    double v = 0.0;
    for (int d = 0; d < grid.dim; ++d) v += (x[d] / r) * grid_interpolate(grid, fields[d], x);
    if (comp == KernelComponent::abs_dr_phi || comp == KernelComponent::abs_dr_lphi)
        return std::abs(v);
    return v;
}

double heat_kernel_eval(const KernelProfile& profile, const double* x, double t) {
    if (!(t > 0.0)) throw validation_error("heat_kernel_eval: t must be positive");
    const double inv = std::pow(t, -1.0 / profile.symbol.sigma());
    double z[3];
    for (int d = 0; d < profile.dim(); ++d) z[d] = x[d] * inv;
    const double val = grid_interpolate(profile.grid, profile.phi, z); // throws when outside
    return std::pow(t, -static_cast<double>(profile.dim()) / profile.symbol.sigma()) * val;
}

double spherical_average(const KernelProfile& profile, KernelComponent comp, double r) {
    if (!(r >= 0.0)) throw validation_error("spherical_average: r must be >= 0");
    const SphereRule& rule = average_rule(profile.dim());
    double acc = 0.0;
    double p[3];
    for (std::size_t q = 0; q < rule.count(); ++q) {
        const double* dir = rule.dir(q);
        for (int d = 0; d < profile.dim(); ++d) p[d] = r * dir[d];
        acc += rule.weights[q] * profile.eval(comp, p);
    }
    return acc;
}

namespace {

double ladder_slope(const KernelProfile& profile, KernelComponent comp, const double* dir,
                    double r_min, double r_max, int num_r, bool spherical) {
    if (!(r_min >= 1.0)) throw validation_error("decay fit: r_min must be >= 1");
    if (!(r_max > r_min)) throw validation_error("decay fit: r_max must exceed r_min");
    if (r_max > profile.trusted_radius() + 1e-12) {
        std::ostringstream os;
        os << "decay fit: r_max " << r_max << " beyond trusted region " << profile.trusted_radius();
        throw validation_error(os.str());
    }
    if (num_r < 2) throw validation_error("decay fit: need at least 2 radii");
    std::vector<double> lx, ly;
    for (int i = 0; i < num_r; ++i) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (num_r - 1));
        double val;
        if (spherical) {
            val = spherical_average(profile, comp, r);
        } else {
            double p[3];
            for (int d = 0; d < profile.dim(); ++d) p[d] = r * dir[d];
            val = profile.eval(comp, p);
        }
        if (!(val > 0.0)) {
            std::ostringstream os;
            os << "decay fit: non-positive value " << val << " at r = " << r
               << "; the component changes sign, use the absolute-value variant";
            throw validation_error(os.str());
        }
        lx.push_back(std::log(r));
        ly.push_back(std::log(val));
    }
    return lsq_slope(lx, ly);
}

} // namespace

double decay_slope(const KernelProfile& profile, KernelComponent comp, double r_min, double r_max,
                   int num_r) {
    return ladder_slope(profile, comp, nullptr, r_min, r_max, num_r, true);
}

double directional_slope(const KernelProfile& profile, KernelComponent comp, const double* dir,
                         double r_min, double r_max, int num_r) {
    return ladder_slope(profile, comp, dir, r_min, r_max, num_r, false);
}

namespace {

struct TailFit {
    bool usable = false;
    double amplitude = 0.0; // T(s) ≈ amplitude * s^exponent (signed)
    double exponent = 0.0;
};

// Amplitude of the known power law T(s) ≈ A s^exponent over the window,
// by least squares on T s^{-exponent}. Fitting the exponent as well would
// let periodization contamination tilt it, and the closed tail integral is
// exponentially sensitive to that tilt.
TailFit fit_tail(const std::vector<double>& s_nodes, const std::vector<double>& t_values,
                 double window_lo, double window_hi, double exponent) {
    TailFit fit;
    fit.exponent = exponent;
    double acc = 0.0;
    std::size_t count = 0;
    double sign = 0.0;
    for (std::size_t i = 0; i < s_nodes.size(); ++i) {
        if (s_nodes[i] < window_lo || s_nodes[i] > window_hi) continue;
        const double v = t_values[i];
        if (v == 0.0) return fit;
        const double sg = v > 0.0 ? 1.0 : -1.0;
        if (sign == 0.0) sign = sg;
        else if (sign != sg) return fit; // sign change: no power-law closure
        acc += v * std::pow(s_nodes[i], -exponent);
        ++count;
    }
    if (count < 6) return fit;
    fit.usable = true;
    fit.amplitude = acc / static_cast<double>(count);
    return fit;
}

double tail_integral(const TailFit& fit, double s_from) {
    if (!fit.usable || !(fit.exponent < -1.0)) return 0.0;
    // ∫_S^∞ A s^p ds, p < -1.
    return fit.amplitude * std::pow(s_from, fit.exponent + 1.0) / (-(fit.exponent + 1.0));
}

} // namespace

CancellationResult cancellation_integral(const KernelProfile& profile, double a, double b,
                                         int s_nodes, int rho_nodes, double s_max_fraction) {
    if (!(a > 0.0) || !(b >= a)) throw validation_error("cancellation_integral: need 0 < a <= b");
    if (a == b) return {0.0, 0.0};
    if (b > profile.trusted_radius()) {
        std::ostringstream os;
        os << "cancellation_integral: b = " << b << " beyond trusted region "
           << profile.trusted_radius();
        throw validation_error(os.str());
    }
    if (!(s_max_fraction > 0.0 && s_max_fraction <= 0.8))
        throw validation_error("cancellation_integral: s_max_fraction must lie in (0, 0.8]");

    const int dim = profile.dim();
    const double sigma = profile.symbol.sigma();
    // Box periodization contaminates the deep tail of the gridded fields, so
    // the s-quadrature stops well inside the box and the remainder is closed
    // by the power law fitted where the samples are still clean.
    const double s_max = s_max_fraction * profile.grid.box;

    // In (s, ρ, θ) variables the integrand factorizes as
    //   σ s^{N-1} LΦ(sθ) / ρ,
    // so the tensor-product rule reduces to two one-dimensional sums with
    // the angular average cached per s-node.
    const GaussRule su = gauss_legendre_on(s_nodes, std::log(1e-6), std::log(s_max));
    std::vector<double> sv(su.nodes.size()), t_signed(su.nodes.size()), t_abs(su.nodes.size());
    double int_signed = 0.0, int_abs = 0.0;
    for (std::size_t i = 0; i < su.nodes.size(); ++i) {
        const double s = std::exp(su.nodes[i]);
        sv[i] = s;
        const double snm1 = std::pow(s, dim - 1);
        t_signed[i] = snm1 * spherical_average(profile, KernelComponent::lphi, s);
        t_abs[i] = snm1 * spherical_average(profile, KernelComponent::abs_lphi, s);
        int_signed += su.weights[i] * s * t_signed[i];
        int_abs += su.weights[i] * s * t_abs[i];
    }
    // Reduced integrand tail: s^{N-1} ∫ LΦ(sθ) dθ ~ s^{-1-σ} (averaged decay
    // at the limit rate).
    const double tail_exp = -(1.0 + sigma);
    const TailFit fit_signed = fit_tail(sv, t_signed, 0.55 * s_max, 0.95 * s_max, tail_exp);
    const TailFit fit_abs = fit_tail(sv, t_abs, 0.55 * s_max, 0.95 * s_max, tail_exp);
    int_signed += tail_integral(fit_signed, s_max);
    int_abs += tail_integral(fit_abs, s_max);

    const GaussRule rho = gauss_legendre_on(rho_nodes, a, b);
    double rho_factor = 0.0;
    for (std::size_t j = 0; j < rho.nodes.size(); ++j) rho_factor += rho.weights[j] / rho.nodes[j];

    return {sigma * int_signed * rho_factor, sigma * int_abs * rho_factor};
}

double profile_equation_residual(const KernelProfile& profile) {
    const SpatialGrid& grid = profile.grid;
    const int dim = grid.dim;
    const double half = 0.5 * grid.box;
    const double sigma = profile.symbol.sigma();
    const std::int64_t size = grid.size();

    const int workers = thread_count();
    const std::int64_t chunk = (size + workers - 1) / workers;
    std::vector<double> maxima(static_cast<std::size_t>(workers), 0.0);
    parallel_for(workers, [&](std::int64_t w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(size, lo + chunk);
        double local = 0.0;
        for (std::int64_t idx = lo; idx < hi; ++idx) {
            int k[3];
            decode_indices(idx, dim, grid.n, k);
            double x[3];
            bool inner = true;
            for (int d = 0; d < dim; ++d) {
                x[d] = grid.coord(k[d]);
                if (std::abs(x[d]) > half) inner = false;
            }
            if (!inner) continue;
            const std::size_t u = static_cast<std::size_t>(idx);
            double radial = 0.0;
            for (int d = 0; d < dim; ++d) radial += x[d] * profile.grad[d][u];
            const double res =
                std::abs(sigma * profile.lphi[u] - dim * profile.phi[u] - radial);
            local = std::max(local, res);
        }
        maxima[static_cast<std::size_t>(w)] = local;
    });
    double best = 0.0;
    for (double v : maxima) best = std::max(best, v);
    return best / profile.max_phi;
}

double shifted_average_difference(const KernelProfile& profile, double r, double s,
                                  const double* phi_dir) {
    if (!(s > 0.0 && s <= 1.0 && r >= 1.0))
        throw validation_error("shifted_average_difference: need 0 < s <= 1 <= r");
    if (r + 1.0 > profile.trusted_radius()) {
        std::ostringstream os;
        os << "shifted_average_difference: r = " << r << " leaves the trusted region";
        throw range_error(os.str());
    }
    const SphereRule& rule = average_rule(profile.dim());
    double acc = 0.0;
    double p[3], q[3];
    for (std::size_t i = 0; i < rule.count(); ++i) {
        const double* dir = rule.dir(i);
        for (int d = 0; d < profile.dim(); ++d) {
            p[d] = r * dir[d];
            q[d] = r * dir[d] - s * phi_dir[d];
        }
        acc += rule.weights[i] *
               std::abs(grid_interpolate(profile.grid, profile.lphi, p) -
                        grid_interpolate(profile.grid, profile.lphi, q));
    }
    return acc;
}

void export_csv(const KernelProfile& profile, std::ostream& os, int stride) {
    if (stride < 1) stride = 1;
    const SpatialGrid& grid = profile.grid;
    for (int d = 0; d < grid.dim; ++d) os << "x" << (d + 1) << ",";
    os << "phi,lphi,l2phi\n";
    char buf[80];
    int k[3] = {0, 0, 0};
    const auto emit = [&](std::int64_t idx) {
        for (int d = 0; d < grid.dim; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g,", grid.coord(k[d]));
            os << buf;
        }
        const std::size_t u = static_cast<std::size_t>(idx);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", profile.phi[u], profile.lphi[u],
                      profile.l2phi[u]);
        os << buf;
    };
    if (grid.dim == 1) {
        for (k[0] = 0; k[0] < grid.n; k[0] += stride) emit(k[0]);
    } else if (grid.dim == 2) {
        for (k[0] = 0; k[0] < grid.n; k[0] += stride)
            for (k[1] = 0; k[1] < grid.n; k[1] += stride)
                emit(static_cast<std::int64_t>(k[0]) * grid.n + k[1]);
    } else {
        for (k[0] = 0; k[0] < grid.n; k[0] += stride)
            for (k[1] = 0; k[1] < grid.n; k[1] += stride)
                for (k[2] = 0; k[2] < grid.n; k[2] += stride)
                    emit((static_cast<std::int64_t>(k[0]) * grid.n + k[1]) * grid.n + k[2]);
    }
}

namespace {

void write_field(std::ofstream& os, const char* name, const std::vector<double>& field) {
    char tag[16] = {0};
    std::strncpy(tag, name, sizeof(tag) - 1);
    os.write(tag, sizeof(tag));
    const std::uint64_t count = field.size();
    os.write(reinterpret_cast<const char*>(&count), sizeof(count));
    os.write(reinterpret_cast<const char*>(field.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
}

std::vector<double> read_field(std::ifstream& is, std::string* name) {
    char tag[16];
    is.read(tag, sizeof(tag));
    std::uint64_t count = 0;
    is.read(reinterpret_cast<char*>(&count), sizeof(count));
    std::vector<double> field(count);
    is.read(reinterpret_cast<char*>(field.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw validation_error("profile cache: truncated field data");
    if (name) name->assign(tag, strnlen(tag, sizeof(tag)));
    return field;
}

} // namespace

void save_binary(const KernelProfile& profile, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw validation_error("save_binary: cannot open " + path);
    os.write("ANHK1", 5);
    const std::uint32_t dim = static_cast<std::uint32_t>(profile.grid.dim);
    const std::uint32_t n = static_cast<std::uint32_t>(profile.grid.n);
    const double box = profile.grid.box;
    const double sigma = profile.symbol.sigma();
    std::uint32_t nfields = 3 + 2 * dim;
    os.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(&box), sizeof(box));
    os.write(reinterpret_cast<const char*>(&sigma), sizeof(sigma));
    os.write(reinterpret_cast<const char*>(&nfields), sizeof(nfields));
    write_field(os, "phi", profile.phi);
    write_field(os, "lphi", profile.lphi);
    write_field(os, "l2phi", profile.l2phi);
    for (int d = 0; d < profile.grid.dim; ++d) {
        const std::string g = "grad" + std::to_string(d + 1);
        const std::string gl = "gradl" + std::to_string(d + 1);
        write_field(os, g.c_str(), profile.grad[d]);
        write_field(os, gl.c_str(), profile.grad_l[d]);
    }
    if (!os) throw validation_error("save_binary: write failed for " + path);
}

KernelProfile load_binary(const std::string& path, const SymbolField& symbol) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw validation_error("load_binary: cannot open " + path);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, "ANHK1", 5) != 0)
        throw validation_error("load_binary: bad magic, not an ANHK1 cache");
    std::uint32_t dim = 0, n = 0, nfields = 0;
    double box = 0.0, sigma = 0.0;
    is.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    is.read(reinterpret_cast<char*>(&box), sizeof(box));
    is.read(reinterpret_cast<char*>(&sigma), sizeof(sigma));
    is.read(reinterpret_cast<char*>(&nfields), sizeof(nfields));
    if (!is) throw validation_error("load_binary: truncated header");
    if (static_cast<int>(dim) != symbol.dim() || std::abs(sigma - symbol.sigma()) > 1e-12)
        throw validation_error("load_binary: cache metadata does not match the symbol");

    KernelProfile profile{SpatialGrid(static_cast<int>(dim), static_cast<int>(n), box),
                          symbol, {}, {}, {}, {}, {}, {}, 0.0, 0.0};
    for (std::uint32_t f = 0; f < nfields; ++f) {
        std::string name;
        std::vector<double> field = read_field(is, &name);
        if (static_cast<std::int64_t>(field.size()) != profile.grid.size())
            throw validation_error("load_binary: field \"" + name + "\" has wrong size");
        if (name == "phi") profile.phi = std::move(field);
        else if (name == "lphi") profile.lphi = std::move(field);
        else if (name == "l2phi") profile.l2phi = std::move(field);
        else if (name.rfind("gradl", 0) == 0) profile.grad_l[name[5] - '1'] = std::move(field);
        else if (name.rfind("grad", 0) == 0) profile.grad[name[4] - '1'] = std::move(field);
        else throw validation_error("load_binary: unknown field \"" + name + "\"");
    }
    if (profile.phi.empty() || profile.lphi.empty() || profile.l2phi.empty())
        throw validation_error("load_binary: cache misses required fields");
    profile.max_phi = *std::max_element(profile.phi.begin(), profile.phi.end());
    double mass = 0.0;
    for (double v : profile.phi) mass += v;
    profile.mass = mass * std::pow(profile.grid.h(), profile.grid.dim);
    // The multiplier is metadata derived from the symbol, not cached.
    profile.multiplier.resize(static_cast<std::size_t>(profile.grid.size()));
    parallel_for(profile.grid.size(), [&](std::int64_t idx) {
        int k[3];
        decode_indices(idx, profile.grid.dim, profile.grid.n, k);
        double xi[3];
        for (int d = 0; d < profile.grid.dim; ++d) xi[d] = profile.grid.freq(k[d]);
        profile.multiplier[static_cast<std::size_t>(idx)] = symbol.m(xi);
    });
    return profile;
}

} // namespace aniso_heat
