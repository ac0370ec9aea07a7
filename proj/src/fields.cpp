#include "aniso_heat/fields.hpp"

#include "aniso_heat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

namespace aniso_heat {

void SpaceTimeField::validate() const {
    if (times.empty()) throw validation_error("SpaceTimeField: empty time ladder");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw validation_error("SpaceTimeField: times must be strictly increasing");
    if (values.size() != times.size() * static_cast<std::size_t>(space_size()))
        throw validation_error("SpaceTimeField: value count does not match lattice x times");
    for (double v : values)
        if (!std::isfinite(v)) throw validation_error("SpaceTimeField: non-finite value");
}

namespace {

double slice_interpolate(const SpaceTimeField& field, std::size_t it, const double* x) {
    const std::size_t stride = static_cast<std::size_t>(field.space_size());
    // lattice_interpolate over the slice without copying.
    const SampleLattice& lat = field.lattice;
    int i0[3] = {0, 0, 0};
    double f[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < lat.dim; ++d) {
        if (lat.npts[d] < 2) continue;
        double u = (x[d] - lat.min[d]) / lat.step[d];
        u = std::clamp(u, 0.0, static_cast<double>(lat.npts[d] - 1));
        i0[d] = std::min(static_cast<int>(u), lat.npts[d] - 2);
        f[d] = u - static_cast<double>(i0[d]);
    }
    const double* base = field.values.data() + it * stride;
    double acc = 0.0;
    const int corners = 1 << lat.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::int64_t idx = 0;
        for (int d = 0; d < lat.dim; ++d) {
            const int bit = (c >> d) & 1;
            w *= bit ? f[d] : (1.0 - f[d]);
            idx = idx * lat.npts[d] + std::min(i0[d] + bit, lat.npts[d] - 1);
        }
        acc += w * base[idx];
    }
    return acc;
}

} // namespace

double SpaceTimeField::eval(const double* x, double t) const {
    const std::size_t nt = times.size();
    if (t <= times.front()) return slice_interpolate(*this, 0, x);
    if (t >= times.back()) return slice_interpolate(*this, nt - 1, x);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[hi - 1], t1 = times[hi];
    const double ft = (t - t0) / (t1 - t0);
    const double v0 = slice_interpolate(*this, hi - 1, x);
    const double v1 = slice_interpolate(*this, hi, x);
    return (1.0 - ft) * v0 + ft * v1;
}

Forcing forcing_constant(int dim, double value) {
    (void)dim;
    Forcing f;
    f.fn = [value](const double*, double) { return value; };
    f.holder_alpha = 1.0;
    f.holder_seminorm = 0.0;
    f.sup_norm = std::abs(value);
    f.name = "constant";
    return f;
}

Forcing forcing_gaussian_bump(int dim, double amplitude, double width,
                              const std::vector<double>& center) {
    if (width <= 0.0) throw validation_error("gaussian-bump: width must be positive");
    std::vector<double> c = center;
    if (c.empty()) c.assign(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(c.size()) != dim)
        throw validation_error("gaussian-bump: center dimension mismatch");
    Forcing f;
    f.fn = [dim, amplitude, width, c](const double* x, double) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        return amplitude * std::exp(-r2 / (width * width));
    };
    f.holder_alpha = 1.0;
    f.holder_seminorm = std::abs(amplitude) * std::sqrt(2.0 / std::exp(1.0)) / width;
    f.sup_norm = std::abs(amplitude);
    f.name = "gaussian-bump";
    return f;
}

Forcing forcing_sin_traveling(int dim, double amplitude, double wavenumber, double omega,
                              double sigma) {
    (void)dim;
    Forcing f;
    f.fn = [amplitude, wavenumber, omega](const double* x, double t) {
        return amplitude * std::sin(wavenumber * x[0] - omega * t);
    };
    f.holder_alpha = 1.0;
    f.holder_seminorm =
        std::abs(amplitude) * (std::abs(wavenumber) + std::pow(std::abs(omega), std::min(1.0, sigma)));
    f.sup_norm = std::abs(amplitude);
    f.name = "sin-traveling";
    return f;
}

Forcing forcing_holder_cusp(int dim, double amplitude, double alpha, double sigma,
                            const std::vector<double>& center, double t_center) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("holder-cusp: alpha must lie in (0,1]");
    std::vector<double> c = center;
    if (c.empty()) c.assign(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(c.size()) != dim)
        throw validation_error("holder-cusp: center dimension mismatch");
    Forcing f;
    f.fn = [dim, amplitude, alpha, sigma, c, t_center](const double* x, double t) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        const double dist = std::sqrt(r2 + std::pow(std::abs(t - t_center), 2.0 / sigma));
        return amplitude * std::max(0.0, 1.0 - std::pow(dist, alpha));
    };
    f.holder_alpha = alpha;
    f.holder_seminorm = std::abs(amplitude);
    f.sup_norm = std::abs(amplitude);
    f.name = "holder-cusp";
    return f;
}

Forcing forcing_from_field(SpaceTimeField field, double alpha, double seminorm) {
    field.validate();
    double sup = 0.0;
    for (double v : field.values) sup = std::max(sup, std::abs(v));
    auto shared = std::make_shared<SpaceTimeField>(std::move(field));
    Forcing f;
    f.fn = [shared](const double* x, double t) { return shared->eval(x, t); };
    f.holder_alpha = alpha;
    f.holder_seminorm = seminorm;
    f.sup_norm = sup;
    f.name = "sampled";
    return f;
}

void write_csv(const SpaceTimeField& field, std::ostream& os) {
    os << "t";
    for (int d = 0; d < field.lattice.dim; ++d) os << ",x" << (d + 1);
    os << ",u\n";
    char buf[64];
    const std::int64_t npts = field.space_size();
    for (std::size_t it = 0; it < field.times.size(); ++it) {
        for (std::int64_t p = 0; p < npts; ++p) {
            double x[3];
            field.lattice.point(p, x);
            std::snprintf(buf, sizeof buf, "%.17g", field.times[it]);
            os << buf;
            for (int d = 0; d < field.lattice.dim; ++d) {
                std::snprintf(buf, sizeof buf, ",%.17g", x[d]);
                os << buf;
            }
            std::snprintf(buf, sizeof buf, ",%.17g\n", field.value(it, p));
            os << buf;
        }
    }
}

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
}

} // namespace

SpaceTimeField read_space_time_csv(std::istream& is, double sigma) {
    std::string header;
    if (!std::getline(is, header)) throw validation_error("space-time CSV: empty stream");
    int dim = 0;
    {
        std::stringstream hs(header);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 3 || cols.front() != "t" || cols.back() != "u")
            throw validation_error("space-time CSV: header must be t,x1[,x2[,x3]],u");
        dim = static_cast<int>(cols.size()) - 2;
        if (dim < 1 || dim > 3) throw validation_error("space-time CSV: dimension must be 1..3");
    }
    struct Row {
        double t;
        double x[3];
        double u;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        Row r{};
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            if (col == 0) r.t = v;
            else if (col <= dim) r.x[col - 1] = v;
            else r.u = v;
            ++col;
        }
        if (col != dim + 2) throw validation_error("space-time CSV: malformed row \"" + line + "\"");
        rows.push_back(r);
    }
    if (rows.empty()) throw validation_error("space-time CSV: no data rows");

    std::vector<double> tv;
    std::vector<std::vector<double>> xv(static_cast<std::size_t>(dim));
    for (const Row& r : rows) {
        tv.push_back(r.t);
        for (int d = 0; d < dim; ++d) xv[static_cast<std::size_t>(d)].push_back(r.x[d]);
    }
    SpaceTimeField field;
    field.sigma = sigma;
    field.provenance = "input";
    field.times = unique_sorted(tv);
    field.lattice.dim = dim;
    for (int d = 0; d < dim; ++d) {
        const auto ax = unique_sorted(xv[static_cast<std::size_t>(d)]);
        if (ax.size() < 2) throw validation_error("space-time CSV: need >= 2 points per axis");
        const double step = ax[1] - ax[0];
        for (std::size_t i = 1; i < ax.size(); ++i)
            if (std::abs(ax[i] - ax[i - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
                throw validation_error("space-time CSV: axis coordinates are not uniformly spaced");
        field.lattice.npts[d] = static_cast<int>(ax.size());
        field.lattice.min[d] = ax.front();
        field.lattice.step[d] = step;
    }
    const std::int64_t npts = field.space_size();
    if (rows.size() != field.times.size() * static_cast<std::size_t>(npts))
        throw validation_error("space-time CSV: rows do not fill the lattice x time ladder");
    field.values.assign(rows.size(), 0.0);
    for (const Row& r : rows) {
        const auto tit = std::lower_bound(field.times.begin(), field.times.end(), r.t - 1e-12);
        const std::size_t it = static_cast<std::size_t>(tit - field.times.begin());
        std::int64_t idx = 0;
        for (int d = 0; d < dim; ++d) {
            const double u = (r.x[d] - field.lattice.min[d]) / field.lattice.step[d];
            idx = idx * field.lattice.npts[d] + static_cast<std::int64_t>(std::lround(u));
        }
        field.value(it, idx) = r.u;
    }
    field.validate();
    return field;
}

} // namespace aniso_heat
