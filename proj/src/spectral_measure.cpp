#include "aniso_heat/spectral_measure.hpp"

#include "aniso_heat/errors.hpp"
#include "aniso_heat/symbol.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace aniso_heat {

namespace {

double dot(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += a[d] * b[d];
    return s;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_unit(const std::vector<double>& dir, int dim, const std::string& where) {
    if (static_cast<int>(dir.size()) != dim) {
        std::ostringstream os;
        os << where << ": direction has " << dir.size() << " components, expected " << dim;
        throw validation_error(os.str());
    }
    const double n = norm(dir);
    if (std::abs(n - 1.0) > 1e-12) {
        std::ostringstream os;
        os << where << ": direction is not unit (|dir| = " << n << ")";
        throw validation_error(os.str());
    }
}

} // namespace

SpectralMeasure::SpectralMeasure(int dim, std::vector<Atom> atoms, std::vector<DensityNode> density)
    : dim_(dim), atoms_(std::move(atoms)), density_(std::move(density)) {
    if (dim_ < 1) throw validation_error("SpectralMeasure: dimension must be >= 1");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        std::ostringstream where;
        where << "atoms[" << i << "]";
        check_unit(atoms_[i].dir, dim_, where.str());
        if (!(atoms_[i].weight >= 0.0)) {
            std::ostringstream os;
            os << where.str() << ": weight is negative (" << atoms_[i].weight << ")";
            throw validation_error(os.str());
        }
        mass_ += atoms_[i].weight;
    }
    for (std::size_t i = 0; i < density_.size(); ++i) {
        std::ostringstream where;
        where << "density.nodes[" << i << "]";
        check_unit(density_[i].dir, dim_, where.str());
        if (!(density_[i].value >= 0.0)) {
            std::ostringstream os;
            os << where.str() << ": density value is negative (" << density_[i].value << ")";
            throw validation_error(os.str());
        }
        if (!(density_[i].qweight > 0.0)) {
            std::ostringstream os;
            os << where.str() << ": quadrature weight must be positive (" << density_[i].qweight << ")";
            throw validation_error(os.str());
        }
        mass_ += density_[i].value * density_[i].qweight;
    }
    if (!std::isfinite(mass_) || !(mass_ > 0.0))
        throw validation_error("SpectralMeasure: total mass must be finite and positive (empty measure?)");
}

double SpectralMeasure::integrate(const std::function<double(const double*)>& f) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * f(a.dir.data());
    for (const auto& n : density_) s += n.value * n.qweight * f(n.dir.data());
    return s;
}

double directional_moment(const SpectralMeasure& mu, const double* zeta, double sigma) {
    const int dim = mu.dim();
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.weight * std::pow(std::abs(dot(zeta, a.dir.data(), dim)), sigma);
    for (const auto& n : mu.density())
        s += n.value * n.qweight * std::pow(std::abs(dot(zeta, n.dir.data(), dim)), sigma);
    return s;
}

namespace {

// Local refinement of the grid minimum. The integrand |ζ·θ|^σ can have a
// kink at the minimizer (atomic measures), so the refinement must not
// assume smoothness: bracketed ternary search (N = 2) and a shrinking
// pattern search (N = 3).
double refine_min_angle(const SpectralMeasure& mu, double sigma, double phi_lo, double phi_hi) {
    auto eval = [&](double phi) {
        const double z[2] = {std::cos(phi), std::sin(phi)};
        return directional_moment(mu, z, sigma);
    };
    double lo = phi_lo, hi = phi_hi;
    for (int it = 0; it < 120; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (eval(m1) <= eval(m2)) hi = m2;
        else lo = m1;
    }
    return eval(0.5 * (lo + hi));
}

double refine_min_sphere3(const SpectralMeasure& mu, double sigma, const double* start, double step) {
    double p[3] = {start[0], start[1], start[2]};
    double best = directional_moment(mu, p, sigma);
    // Tangent basis at p, re-derived after every accepted move.
    while (step > 1e-10) {
        double u[3], v[3];
        const double ax = std::abs(p[0]), ay = std::abs(p[1]), az = std::abs(p[2]);
        double e[3] = {0.0, 0.0, 0.0};
        e[(ax <= ay && ax <= az) ? 0 : (ay <= az ? 1 : 2)] = 1.0;
        u[0] = p[1] * e[2] - p[2] * e[1];
        u[1] = p[2] * e[0] - p[0] * e[2];
        u[2] = p[0] * e[1] - p[1] * e[0];
        double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        for (double& x : u) x /= un;
        v[0] = p[1] * u[2] - p[2] * u[1];
        v[1] = p[2] * u[0] - p[0] * u[2];
        v[2] = p[0] * u[1] - p[1] * u[0];

        bool improved = false;
        for (int s = 0; s < 4; ++s) {
            const double* t = (s < 2) ? u : v;
            const double sign = (s % 2 == 0) ? 1.0 : -1.0;
            double q[3] = {p[0] + sign * step * t[0], p[1] + sign * step * t[1], p[2] + sign * step * t[2]};
            const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
            for (double& x : q) x /= qn;
            const double val = directional_moment(mu, q, sigma);
            if (val < best) {
                best = val;
                p[0] = q[0];
                p[1] = q[1];
                p[2] = q[2];
                improved = true;
                break;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

} // namespace

double SpectralMeasure::ellipticity_unchecked(double sigma) const {
    if (!(sigma > 0.0 && sigma < 2.0)) throw validation_error("ellipticity: sigma must lie in (0,2)");
    const SphereRule rule = sphere_rule(dim_);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < rule.count(); ++i) {
        const double val = directional_moment(*this, rule.dir(i), sigma);
        if (val < best) {
            best = val;
            best_i = i;
        }
    }
    if (dim_ == 2) {
        const double dphi = 2.0 * std::numbers::pi / static_cast<double>(rule.count());
        const double phi0 = dphi * static_cast<double>(best_i);
        best = std::min(best, refine_min_angle(*this, sigma, phi0 - dphi, phi0 + dphi));
    } else if (dim_ == 3) {
        const double step = 2.0 * std::sqrt(4.0 * std::numbers::pi / static_cast<double>(rule.count()));
        best = std::min(best, refine_min_sphere3(*this, sigma, rule.dir(best_i), step));
    }
    return best;
}

double SpectralMeasure::ellipticity(double sigma) const {
    const double lam = ellipticity_unchecked(sigma);
    if (lam < 1e-10 * mass_) {
        std::ostringstream os;
        os << "degenerate measure: ellipticity " << lam << " below tolerance " << 1e-10 * mass_
           << " (measure supported in a proper subspace)";
        throw validation_error(os.str());
    }
    return lam;
}

namespace {

std::vector<double> axis_dir(int dim, int axis) {
    std::vector<double> e(dim, 0.0);
    e[axis] = 1.0;
    return e;
}

// Quadrature of ∫_{S^{n-1}} |e·θ|^σ dθ on the given rule (e = first axis).
double axis_moment_on_rule(const SphereRule& rule, double sigma) {
    double q = 0.0;
    for (std::size_t i = 0; i < rule.count(); ++i)
        q += rule.weights[i] * std::pow(std::abs(rule.dir(i)[0]), sigma);
    return q;
}

} // namespace

SpectralMeasure measure_from_spec(const nlohmann::json& spec, double sigma) {
    if (!spec.is_object()) throw validation_error("measure: expected a JSON object");
    if (!spec.contains("dimension") || !spec["dimension"].is_number_integer())
        throw validation_error("measure.dimension: missing or not an integer");
    const int dim = spec["dimension"].get<int>();
    if (dim < 1) throw validation_error("measure.dimension: must be >= 1");

    std::vector<SpectralMeasure::Atom> atoms;
    std::vector<SpectralMeasure::DensityNode> density;

    if (spec.contains("atoms")) {
        if (!spec["atoms"].is_array()) throw validation_error("measure.atoms: expected an array");
        std::size_t idx = 0;
        for (const auto& a : spec["atoms"]) {
            std::ostringstream where;
            where << "measure.atoms[" << idx << "]";
            if (!a.is_object() || !a.contains("direction") || !a.contains("weight"))
                throw validation_error(where.str() + ": expected {\"direction\": [...], \"weight\": w}");
            SpectralMeasure::Atom atom;
            atom.dir = a["direction"].get<std::vector<double>>();
            atom.weight = a["weight"].get<double>();
            atoms.push_back(std::move(atom));
            ++idx;
        }
    }

    if (spec.contains("density")) {
        const auto& dj = spec["density"];
        if (!dj.is_object() || !dj.contains("kind"))
            throw validation_error("measure.density: expected an object with a \"kind\"");
        const std::string kind = dj["kind"].get<std::string>();

        if (kind == "isotropic") {
            const SphereRule rule = sphere_rule(dim);
            double value = 1.0;
            if (dj.contains("normalization")) {
                const std::string norm = dj["normalization"].get<std::string>();
                if (norm != "unit-symbol")
                    throw validation_error("measure.density.normalization: unknown value \"" + norm + "\"");
                value = 1.0 / (stable_constant(sigma) * axis_moment_on_rule(rule, sigma));
            } else if (dj.contains("symbol-scale")) {
                // m(ξ) = scale · |ξ|^σ: a time-rescaled isotropic operator.
                const double scale = dj["symbol-scale"].get<double>();
                if (!(scale > 0.0))
                    throw validation_error("measure.density.symbol-scale: must be positive");
                value = scale / (stable_constant(sigma) * axis_moment_on_rule(rule, sigma));
            } else if (dj.contains("value")) {
                value = dj["value"].get<double>();
            }
            for (std::size_t i = 0; i < rule.count(); ++i) {
                SpectralMeasure::DensityNode node;
                node.dir.assign(rule.dir(i), rule.dir(i) + dim);
                node.value = value;
                node.qweight = rule.weights[i];
                density.push_back(std::move(node));
            }
        } else if (kind == "samples") {
            if (!dj.contains("nodes") || !dj["nodes"].is_array())
                throw validation_error("measure.density.nodes: expected an array");
            std::size_t idx = 0;
            for (const auto& n : dj["nodes"]) {
                std::ostringstream where;
                where << "measure.density.nodes[" << idx << "]";
                if (!n.is_object() || !n.contains("direction") || !n.contains("value") || !n.contains("qweight"))
                    throw validation_error(where.str() +
                                           ": expected {\"direction\": [...], \"value\": v, \"qweight\": q}");
                SpectralMeasure::DensityNode node;
                node.dir = n["direction"].get<std::vector<double>>();
                node.value = n["value"].get<double>();
                node.qweight = n["qweight"].get<double>();
                density.push_back(std::move(node));
                ++idx;
            }
        } else if (kind == "sum-of-laplacians") {
            if (!dj.contains("blocks") || !dj["blocks"].is_array())
                throw validation_error("measure.density.blocks: expected an array of block sizes");
            const auto blocks = dj["blocks"].get<std::vector<int>>();
            int total = 0;
            for (int b : blocks) {
                if (b < 1) throw validation_error("measure.density.blocks: block sizes must be >= 1");
                total += b;
            }
            if (total != dim)
                throw validation_error("measure.density.blocks: block sizes must sum to the dimension");
            const double c_sig = stable_constant(sigma);
            int offset = 0;
            for (int b : blocks) {
                if (b == 1) {
                    // One-dimensional block: a single atom normalized so the
                    // block symbol is |ξ_j|^σ.
                    SpectralMeasure::Atom atom;
                    atom.dir = axis_dir(dim, offset);
                    atom.weight = 1.0 / c_sig;
                    atoms.push_back(std::move(atom));
                } else {
                    // Uniform density on the block subsphere, normalized on
                    // the actual quadrature so the block-axis symbol is exact.
                    const SphereRule sub = sphere_rule(b);
                    const double value = 1.0 / (c_sig * axis_moment_on_rule(sub, sigma));
                    for (std::size_t i = 0; i < sub.count(); ++i) {
                        SpectralMeasure::DensityNode node;
                        node.dir.assign(dim, 0.0);
                        for (int d = 0; d < b; ++d) node.dir[offset + d] = sub.dir(i)[d];
                        node.value = value;
                        node.qweight = sub.weights[i];
                        density.push_back(std::move(node));
                    }
                }
                offset += b;
            }
        } else {
            throw validation_error("measure.density.kind: unknown kind \"" + kind + "\"");
        }
    }

    if (atoms.empty() && density.empty())
        throw validation_error("measure: needs at least one of \"atoms\" or \"density\"");

    return SpectralMeasure(dim, std::move(atoms), std::move(density));
}

} // namespace aniso_heat
