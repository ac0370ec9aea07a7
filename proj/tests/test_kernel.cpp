#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aniso_heat/kernel.hpp"
#include "aniso_heat/solver.hpp"
#include "oracles.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

using namespace aniso_heat;
using nlohmann::json;

namespace {

SymbolField cauchy_symbol() {
    json spec = {{"dimension", 1},
                 {"density", {{"kind", "isotropic"}, {"normalization", "unit-symbol"}}}};
    return SymbolField(measure_from_spec(spec, 1.0), 1.0);
}

const KernelProfile& cauchy_profile() {
    static const KernelProfile profile = build_profile(cauchy_symbol(), SpatialGrid(1, 65536, 640.0));
    return profile;
}

} // namespace

TEST_CASE("resolution guard rejects coarse grids") {
    json spec = {{"dimension", 1},
                 {"density", {{"kind", "isotropic"}, {"normalization", "unit-symbol"}}}};
    SymbolField sym(measure_from_spec(spec, 0.5), 0.5);
    // σ = 1/2 needs (π/h)^{1/2} >= ln 1e14, far beyond the default spacing
    CHECK_THROWS_WITH_AS(build_profile(sym, SpatialGrid(1, 4096, 40.0)),
                         doctest::Contains("grid too coarse"), validation_error);
    CHECK(required_grid_n(sym, 40.0) > 4096);
}

TEST_CASE("Cauchy profile against the closed form") {
    const KernelProfile& p = cauchy_profile();
    CHECK(p.mass == doctest::Approx(1.0).epsilon(1e-6));
    double x = 0.0;
    CHECK(p.eval(KernelComponent::phi, &x) ==
          doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));
    CHECK(p.eval(KernelComponent::lphi, &x) ==
          doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));
    for (double xv = -10.0; xv <= 10.0; xv += 0.37) {
        CHECK(p.eval(KernelComponent::phi, &xv) ==
              doctest::Approx(oracles::cauchy_phi(xv)).epsilon(1e-3));
        CHECK(p.eval(KernelComponent::lphi, &xv) ==
              doctest::Approx(oracles::cauchy_lphi(xv)).epsilon(2e-3));
        CHECK(p.eval(KernelComponent::l2phi, &xv) ==
              doctest::Approx(oracles::cauchy_l2phi(xv)).epsilon(4e-3));
    }
}

TEST_CASE("heat kernel evaluation and self-similarity") {
    const KernelProfile& p = cauchy_profile();
    double x = 1.7;
    CHECK(heat_kernel_eval(p, &x, 1.0) ==
          doctest::Approx(p.eval(KernelComponent::phi, &x)).epsilon(1e-12));
    // Cauchy semigroup closed form on |x| <= 5, t in [0.5, 2]
    for (double t : {0.5, 0.9, 1.4, 2.0})
        for (double xv = -5.0; xv <= 5.0; xv += 0.61)
            CHECK(heat_kernel_eval(p, &xv, t) ==
                  doctest::Approx(oracles::cauchy_heat_kernel(xv, t)).epsilon(1e-4));
    // P(x,t) = λ^N P(λx, λ^σ t)
    for (double t : {0.7, 1.3}) {
        for (double xv : {0.4, 2.2, 6.0}) {
            const double lambda = 2.0;
            double lx = lambda * xv;
            CHECK(heat_kernel_eval(p, &xv, t) ==
                  doctest::Approx(lambda * heat_kernel_eval(p, &lx, lambda * t)).epsilon(1e-4));
        }
    }
    double far = 1.0;
    CHECK_THROWS_AS(heat_kernel_eval(p, &far, 1e-9), range_error);
    CHECK_THROWS_AS(heat_kernel_eval(p, &far, -1.0), validation_error);
}

TEST_CASE("spherical average basics") {
    const KernelProfile& p = cauchy_profile();
    // constant integrand at r = 0: surface of S^0 is 2
    CHECK(spherical_average(p, KernelComponent::phi, 0.0) ==
          doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-4));
    for (double r : {0.5, 2.0, 11.0})
        CHECK(spherical_average(p, KernelComponent::abs_lphi, r) >=
              std::abs(spherical_average(p, KernelComponent::lphi, r)));
}

TEST_CASE("decay slopes of the Cauchy family") {
    const KernelProfile& p = cauchy_profile();
    CHECK(decay_slope(p, KernelComponent::phi, 3.0, 30.0, 16) ==
          doctest::Approx(-2.0).epsilon(0.05));
    // |L²Φ| ~ r^{-4}: within every-β<σ average bound r^{-(N+β)}
    CHECK(decay_slope(p, KernelComponent::abs_l2phi, 3.0, 30.0, 16) <= -(1.0 + 0.9));
    // signed LΦ average changes sign at r = 1; the window [1, ...] keeps one sign
    CHECK_THROWS_WITH_AS(decay_slope(p, KernelComponent::lphi, 1.0, 30.0, 16),
                         doctest::Contains("absolute-value"), validation_error);
    CHECK_THROWS_AS(decay_slope(p, KernelComponent::phi, 0.5, 30.0, 8), validation_error);
    CHECK_THROWS_AS(decay_slope(p, KernelComponent::phi, 3.0, 600.0, 8), validation_error);
}

TEST_CASE("cancellation of LP over sigma-parabolic annuli") {
    const KernelProfile& p = cauchy_profile();
    auto c12 = cancellation_integral(p, 1.0, 2.0);
    CHECK(std::abs(c12.integral) <= 1e-3 * c12.abs_integral);
    auto c14 = cancellation_integral(p, 1.0, 4.0);
    CHECK(std::abs(c14.integral) <= 1e-3 * c14.abs_integral);
    // empty annulus
    auto cae = cancellation_integral(p, 1.5, 1.5);
    CHECK(cae.integral == 0.0);
    CHECK(cae.abs_integral == 0.0);
    // the companion integral scales like log(b/a)
    CHECK(c14.abs_integral == doctest::Approx(2.0 * c12.abs_integral).epsilon(1e-10));
    CHECK_THROWS_AS(cancellation_integral(p, 1.0, 1e4), validation_error);
}

TEST_CASE("profile equation residual") {
    const KernelProfile& p = cauchy_profile();
    CHECK(profile_equation_residual(p) <= 1e-3);
    // at x = 0 the equation reads σ LΦ(0) = N Φ(0); both equal 1/π here
    double x = 0.0;
    CHECK(p.eval(KernelComponent::lphi, &x) ==
          doctest::Approx(p.eval(KernelComponent::phi, &x)).epsilon(1e-4));
    // residual decreases as the grid grows at fixed spacing
    json spec = {{"dimension", 1},
                 {"density", {{"kind", "isotropic"}, {"normalization", "unit-symbol"}}}};
    SymbolField sym(measure_from_spec(spec, 1.0), 1.0);
    const double coarse = profile_equation_residual(build_profile(sym, SpatialGrid(1, 8192, 80.0)));
    const double fine = profile_equation_residual(build_profile(sym, SpatialGrid(1, 16384, 160.0)));
    CHECK(fine < coarse);
}

TEST_CASE("shifted average difference") {
    const KernelProfile& p = cauchy_profile();
    const double dir = 1.0;
    const double d1 = shifted_average_difference(p, 4.0, 0.2, &dir);
    CHECK(d1 > 0.0);
    // near-linearity in s
    const double d2 = shifted_average_difference(p, 4.0, 0.1, &dir);
    CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.2));
    CHECK_THROWS_AS(shifted_average_difference(p, 600.0, 0.2, &dir), range_error);
    CHECK_THROWS_AS(shifted_average_difference(p, 4.0, 1.5, &dir), validation_error);
}

TEST_CASE("Parseval consistency of the stored iterates") {
    json spec = {{"dimension", 1},
                 {"density", {{"kind", "isotropic"}, {"normalization", "unit-symbol"}}}};
    SymbolField sym(measure_from_spec(spec, 1.0), 1.0);
    KernelProfile p = build_profile(sym, SpatialGrid(1, 8192, 80.0));
    const auto once = apply_operator(sym, p.grid, p.phi);
    const auto twice = apply_operator(sym, p.grid, once);
    double ref = 0.0, err = 0.0, err1 = 0.0;
    for (std::size_t i = 0; i < twice.size(); ++i) {
        ref = std::max(ref, std::abs(p.l2phi[i]));
        err = std::max(err, std::abs(twice[i] - p.l2phi[i]));
        err1 = std::max(err1, std::abs(once[i] - p.lphi[i]));
    }
    CHECK(err <= 1e-8 * ref);
    CHECK(err1 <= 1e-8);
}

TEST_CASE("csv and binary round trips") {
    json spec = {{"dimension", 2},
                 {"density", {{"kind", "isotropic"}, {"normalization", "unit-symbol"}}}};
    SymbolField sym(measure_from_spec(spec, 1.0), 1.0);
    KernelProfile p = build_profile(sym, SpatialGrid(2, 64, 2.0e-2 * 64.0));

    std::ostringstream os;
    export_csv(p, os, 16);
    const std::string text = os.str();
    CHECK(text.rfind("x1,x2,phi,lphi,l2phi\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 4);

    const std::string path = (std::filesystem::temp_directory_path() / "anhk_test.bin").string();
    save_binary(p, path);
    KernelProfile loaded = load_binary(path, sym);
    CHECK(loaded.grid.n == p.grid.n);
    CHECK(loaded.grid.box == doctest::Approx(p.grid.box));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.phi.size(); ++i) {
        worst = std::max(worst, std::abs(p.phi[i] - loaded.phi[i]));
        worst = std::max(worst, std::abs(p.grad_l[1][i] - loaded.grad_l[1][i]));
    }
    CHECK(worst == 0.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_binary("/nonexistent/anhk.bin", sym), validation_error);
}
