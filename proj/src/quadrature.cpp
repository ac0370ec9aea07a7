#include "aniso_heat/quadrature.hpp"

#include "aniso_heat/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace aniso_heat {

namespace {

GaussRule compute_gauss_legendre(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1) throw validation_error("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

GaussRule gauss_legendre_on(int order, double a, double b) {
    const GaussRule& base = gauss_legendre(order);
    GaussRule rule;
    rule.nodes.resize(base.nodes.size());
    rule.weights.resize(base.weights.size());
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        rule.nodes[i] = mid + rad * base.nodes[i];
        rule.weights[i] = rad * base.weights[i];
    }
    return rule;
}

std::pair<double, double> lsq_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw validation_error("lsq_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw validation_error("lsq_line: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return {intercept, slope};
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    return lsq_line(x, y).second;
}

} // namespace aniso_heat
