#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: direct quadrature for the stable constant, closed forms for the
// Cauchy semigroup, and small brute-force references.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 24) {
    struct Impl {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } impl{f};
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return impl.run(a, b, fa, fm, fb, whole, tol, depth);
}

/// ∫_0^∞ (1 - cos t) t^{-1-σ} dt by series near zero, adaptive Simpson in
/// the middle, and an integration-by-parts asymptotic tail.
inline double stable_constant_quadrature(double sigma) {
    const double delta = 0.5, big = 200.0;
    // [0, δ]: (1-cos t) = Σ (-1)^{k+1} t^{2k}/(2k)!
    double head = 0.0, fact = 1.0;
    for (int k = 1; k <= 12; ++k) {
        fact *= (2.0 * k - 1.0) * (2.0 * k);
        const double term = std::pow(delta, 2.0 * k - sigma) / (fact * (2.0 * k - sigma));
        head += (k % 2 == 1 ? term : -term);
    }
    const double mid = adaptive_simpson(
        [sigma](double t) { return (1.0 - std::cos(t)) * std::pow(t, -1.0 - sigma); }, delta, big,
        1e-13);
    // [A, ∞): A^{-σ}/σ minus the oscillatory part by repeated parts.
    double tail = std::pow(big, -sigma) / sigma;
    double cosint = 0.0;
    double coeff = 1.0, nu = 1.0 + sigma;
    for (int level = 0; level < 4; ++level) {
        cosint += coeff * (-std::sin(big) * std::pow(big, -nu) +
                           nu * std::cos(big) * std::pow(big, -nu - 1.0));
        coeff *= -nu * (nu + 1.0);
        nu += 2.0;
    }
    tail -= cosint;
    return head + mid + tail;
}

inline double cauchy_phi(double x) { return 1.0 / (std::numbers::pi * (1.0 + x * x)); }
inline double cauchy_lphi(double x) {
    const double d = 1.0 + x * x;
    return (1.0 - x * x) / (std::numbers::pi * d * d);
}
inline double cauchy_l2phi(double x) {
    const double d = 1.0 + x * x;
    return 2.0 * (1.0 - 3.0 * x * x) / (std::numbers::pi * d * d * d);
}
inline double cauchy_heat_kernel(double x, double t) {
    return t / (std::numbers::pi * (t * t + x * x));
}

} // namespace oracles
