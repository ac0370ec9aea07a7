#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aniso_heat/spectral_measure.hpp"
#include "aniso_heat/errors.hpp"
#include "oracles.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace aniso_heat;
using nlohmann::json;

namespace {

SpectralMeasure from_json(const std::string& text, double sigma = 1.0) {
    return measure_from_spec(json::parse(text), sigma);
}

} // namespace

TEST_CASE("two axis atoms in the plane") {
    auto mu = from_json(R"({"dimension":2,"atoms":[
        {"direction":[1,0],"weight":1.0},{"direction":[0,1],"weight":1.0}]})");
    CHECK(mu.total_mass() == doctest::Approx(2.0));
    // min over S^1 of |z1| + |z2| is 1, attained on the axes
    CHECK(mu.ellipticity(1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("isotropic density in the plane") {
    auto mu = from_json(R"({"dimension":2,"density":{"kind":"isotropic","value":1.0}})");
    CHECK(mu.total_mass() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-8));
    // oracle: ∫_0^{2π} |cos φ| dφ = 4 (adaptive Simpson agrees)
    const double oracle = oracles::adaptive_simpson(
        [](double p) { return std::abs(std::cos(p)); }, 0.0, 2.0 * std::numbers::pi, 1e-12);
    CHECK(oracle == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(mu.ellipticity(1.0) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("validation errors name the offending entry") {
    CHECK_THROWS_WITH_AS(from_json(R"({"dimension":2,"atoms":[{"direction":[1,0],"weight":-1}]})"),
                         doctest::Contains("atoms[0]"), validation_error);
    CHECK_THROWS_WITH_AS(from_json(R"({"dimension":2,"atoms":[{"direction":[1,1],"weight":1}]})"),
                         doctest::Contains("not unit"), validation_error);
    CHECK_THROWS_AS(from_json(R"({"dimension":2})"), validation_error);
    CHECK_THROWS_AS(from_json(R"({"dimension":2,"density":{"kind":"platonic"}})"), validation_error);
}

TEST_CASE("single atom is degenerate") {
    auto mu = from_json(R"({"dimension":2,"atoms":[{"direction":[1,0],"weight":1}]})");
    CHECK_THROWS_WITH_AS(mu.ellipticity(1.0), doctest::Contains("degenerate"), validation_error);
}

TEST_CASE("total mass adds atoms and density") {
    auto mu = from_json(R"({"dimension":2,"atoms":[
        {"direction":[1,0],"weight":2.0},{"direction":[0,1],"weight":3.0}]})");
    CHECK(mu.total_mass() == doctest::Approx(5.0));
}

TEST_CASE("ellipticity is rotation invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 4; ++trial) {
        const double a = angle(rng);
        const double c = std::cos(a), s = std::sin(a);
        json spec = {{"dimension", 2},
                     {"atoms", json::array({json{{"direction", {c, s}}, {"weight", 1.0}},
                                            json{{"direction", {-s, c}}, {"weight", 1.0}}})}};
        auto mu = measure_from_spec(spec, 1.0);
        CHECK(mu.ellipticity(1.0) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // three-dimensional check with a rotation about the z axis
    for (double a : {0.0, 0.31, 1.2}) {
        const double c = std::cos(a), s = std::sin(a);
        json spec = {{"dimension", 3},
                     {"atoms", json::array({json{{"direction", {c, s, 0.0}}, {"weight", 1.0}},
                                            json{{"direction", {-s, c, 0.0}}, {"weight", 1.0}},
                                            json{{"direction", {0.0, 0.0, 1.0}}, {"weight", 1.0}}})}};
        auto mu = measure_from_spec(spec, 1.0);
        CHECK(mu.ellipticity(1.0) == doctest::Approx(1.0).epsilon(2e-5));
    }
}

TEST_CASE("doubling the weights doubles mass and ellipticity exactly") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<SpectralMeasure::Atom> atoms1, atoms2;
        for (int i = 0; i < 5; ++i) {
            double x = gauss(rng), y = gauss(rng);
            const double n = std::hypot(x, y);
            const double w = std::abs(gauss(rng)) + 0.1;
            atoms1.push_back({{x / n, y / n}, w});
            atoms2.push_back({{x / n, y / n}, 2.0 * w});
        }
        SpectralMeasure m1(2, atoms1, {});
        SpectralMeasure m2(2, atoms2, {});
        CHECK(m2.total_mass() == 2.0 * m1.total_mass());
        const double sigma = 0.5 + 1.2 * std::abs(std::sin(static_cast<double>(trial)));
        CHECK(m2.ellipticity_unchecked(sigma) == 2.0 * m1.ellipticity_unchecked(sigma));
    }
}

TEST_CASE("ellipticity bounded by the total mass") {
    auto mu = from_json(R"({"dimension":2,"density":{"kind":"isotropic","value":0.7}})");
    for (double sigma : {0.4, 1.0, 1.7})
        CHECK(mu.ellipticity(sigma) <= mu.total_mass() * (1.0 + 1e-12));
}

TEST_CASE("sum-of-laplacians expansion") {
    auto mu = from_json(R"({"dimension":2,"density":{"kind":"sum-of-laplacians","blocks":[1,1]}})");
    CHECK(mu.atoms().size() == 2);
    CHECK(mu.density().empty());
    // block of dimension 2 expands to a density on the subsphere
    auto mu3 = from_json(R"({"dimension":3,"density":{"kind":"sum-of-laplacians","blocks":[2,1]}})");
    CHECK(mu3.atoms().size() == 1);
    CHECK(!mu3.density().empty());
    CHECK_THROWS_AS(from_json(R"({"dimension":3,"density":{"kind":"sum-of-laplacians","blocks":[1,1]}})"),
                    validation_error);
}

TEST_CASE("density samples kind round-trips values") {
    auto mu = from_json(R"({"dimension":2,"density":{"kind":"samples","nodes":[
        {"direction":[1,0],"value":0.5,"qweight":3.0},
        {"direction":[0,1],"value":1.5,"qweight":1.0}]}})");
    CHECK(mu.total_mass() == doctest::Approx(3.0));
}
