#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace aniso_heat {

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Nodes/weights mapped to [a, b].
GaussRule gauss_legendre_on(int order, double a, double b);

/// Least-squares slope of y against x.
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares line fit; returns {intercept, slope}.
std::pair<double, double> lsq_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace aniso_heat
