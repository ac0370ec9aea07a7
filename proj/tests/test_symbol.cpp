#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aniso_heat/symbol.hpp"
#include "aniso_heat/errors.hpp"
#include "oracles.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace aniso_heat;
using nlohmann::json;

TEST_CASE("stable constant against the defining integral") {
    // σ = 1: ∫ (1-cos t)/t² = π/2
    CHECK(stable_constant(1.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    // σ = 1/2: Γ formula gives √(2π); quadrature confirms
    CHECK(stable_constant(0.5) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    for (double sigma : {0.3, 0.5, 0.9, 1.0, 1.3, 1.7, 1.9}) {
        const double quad = oracles::stable_constant_quadrature(sigma);
        CHECK(stable_constant(sigma) == doctest::Approx(quad).epsilon(1e-8));
    }
    CHECK_THROWS_AS(stable_constant(2.0), validation_error);
    CHECK_THROWS_AS(stable_constant(0.0), validation_error);
    CHECK_THROWS_AS(stable_constant(-0.5), validation_error);
}

namespace {

SymbolField make_symbol(const std::string& text, double sigma) {
    return SymbolField(measure_from_spec(json::parse(text), sigma), sigma);
}

} // namespace

TEST_CASE("isotropic angular factor is constant") {
    auto sym = make_symbol(R"({"dimension":2,"density":{"kind":"isotropic","value":1.0}})", 1.0);
    const double expected = sym.c_sigma() * 4.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 32; ++i) {
        const double a = angle(rng);
        const double z[2] = {std::cos(a), std::sin(a)};
        CHECK(sym.g(z) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("sum-of-laplacians symbol matches the closed form") {
    auto sym = make_symbol(R"({"dimension":2,"density":{"kind":"sum-of-laplacians","blocks":[1,1]}})", 1.0);
    const double e1[2] = {1.0, 0.0};
    CHECK(sym.g(e1) == doctest::Approx(1.0).epsilon(1e-10));
    const double xi[2] = {3.0, 4.0};
    CHECK(sym.m(xi) == doctest::Approx(7.0).epsilon(1e-9));

    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    for (double sigma : {0.6, 1.0, 1.4}) {
        auto s = make_symbol(R"({"dimension":2,"density":{"kind":"sum-of-laplacians","blocks":[1,1]}})",
                             sigma);
        for (int i = 0; i < 64; ++i) {
            double v[2] = {3.0 * gauss(rng), 3.0 * gauss(rng)};
            const double closed =
                std::pow(std::abs(v[0]), sigma) + std::pow(std::abs(v[1]), sigma);
            CHECK(s.m(v) == doctest::Approx(closed).epsilon(1e-9));
        }
    }
}

TEST_CASE("symbol vanishes only at zero and is homogeneous") {
    auto sym = make_symbol(R"({"dimension":2,"atoms":[
        {"direction":[1,0],"weight":1.0},{"direction":[0,1],"weight":1.0}]})", 0.8);
    const double zero[2] = {0.0, 0.0};
    CHECK(sym.m(zero) == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 64; ++i) {
        double v[2] = {gauss(rng), gauss(rng)};
        double v2[2] = {2.0 * v[0], 2.0 * v[1]};
        const double mv = sym.m(v);
        CHECK(mv > 0.0);
        CHECK(sym.m(v2) == doctest::Approx(std::pow(2.0, 0.8) * mv).epsilon(1e-13));
    }
}

TEST_CASE("two-sided bound by ellipticity and mass") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    auto sym = make_symbol(R"({"dimension":2,"atoms":[
        {"direction":[1,0],"weight":0.4},{"direction":[0,1],"weight":1.1},
        {"direction":[0.7071067811865476,0.7071067811865476],"weight":0.3}]})", 1.2);
    const double lo = sym.lambda() * sym.c_sigma();
    const double hi = sym.mass() * sym.c_sigma();
    for (int i = 0; i < 128; ++i) {
        double v[2] = {gauss(rng), gauss(rng)};
        const double n = std::hypot(v[0], v[1]);
        if (n < 1e-6) continue;
        const double z[2] = {v[0] / n, v[1] / n};
        const double g = sym.g(z);
        CHECK(g >= lo * (1.0 - 1e-9));
        CHECK(g <= hi * (1.0 + 1e-9));
        const double m = sym.m(v);
        CHECK(m >= lo * std::pow(n, 1.2) * (1.0 - 1e-9));
        CHECK(m <= hi * std::pow(n, 1.2) * (1.0 + 1e-9));
    }
}

TEST_CASE("non-unit direction rejected by g") {
    auto sym = make_symbol(R"({"dimension":2,"density":{"kind":"isotropic","value":1.0}})", 1.0);
    const double bad[2] = {1.0, 0.5};
    CHECK_THROWS_AS(sym.g(bad), validation_error);
}

TEST_CASE("three-dimensional density cache stays close to exact evaluation") {
    auto sym = make_symbol(R"({"dimension":3,"density":{"kind":"isotropic","value":1.0}})", 1.0);
    // exact: g(ζ)/c_σ = ∫_{S²} |ζ·θ| dθ = 2π for every ζ
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 16; ++i) {
        double v[3] = {gauss(rng), gauss(rng), gauss(rng)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        const double z[3] = {v[0] / n, v[1] / n, v[2] / n};
        CHECK(sym.g(z) == doctest::Approx(sym.c_sigma() * 2.0 * std::numbers::pi).epsilon(2e-3));
    }
}
