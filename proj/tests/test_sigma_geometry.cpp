#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aniso_heat/sigma_geometry.hpp"

#include <cmath>
#include <random>

using namespace aniso_heat;

TEST_CASE("sigma norm arithmetic") {
    SigmaPoint y{{3.0}, 4.0, 1.0};
    CHECK(sigma_norm(y) == doctest::Approx(5.0));
    SigmaPoint z{{0.0, 0.0}, -8.0, 1.5};
    CHECK(sigma_norm(z) == doctest::Approx(std::pow(8.0, 1.0 / 1.5)));
    SigmaPoint o{{0.0}, 0.0, 0.7};
    CHECK(sigma_norm(o) == 0.0);
}

TEST_CASE("sigma norm scaling and euclidean comparison") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    for (double sigma : {0.5, 1.0, 1.5}) {
        for (int i = 0; i < 32; ++i) {
            double x[2] = {gauss(rng), gauss(rng)};
            const double t = gauss(rng);
            const double lambda = std::abs(gauss(rng)) + 0.5;
            double lx[2] = {lambda * x[0], lambda * x[1]};
            CHECK(sigma_norm(lx, 2, std::pow(lambda, sigma) * t, sigma) ==
                  doctest::Approx(lambda * sigma_norm(x, 2, t, sigma)).epsilon(1e-12));
            // |Y| <= |Y|_sigma^{min(sigma,1)} on |Y|_sigma <= 1
            const double ns = sigma_norm(x, 2, t, sigma);
            if (ns <= 1.0) {
                const double eu = std::sqrt(x[0] * x[0] + x[1] * x[1] + t * t);
                CHECK(eu <= std::pow(ns, std::min(sigma, 1.0)) + 1e-12);
            }
        }
    }
}

namespace {

SpaceTimeField sampled_field(int nx, int nt, double sigma,
                             const std::function<double(double, double, double)>& f) {
    SpaceTimeField field;
    field.sigma = sigma;
    field.provenance = "input";
    field.lattice = SampleLattice::centered(2, nx, 3.0);
    for (int i = 0; i < nt; ++i) field.times.push_back(0.25 * (i + 1));
    field.values.resize(field.times.size() * static_cast<std::size_t>(field.lattice.size()));
    for (std::size_t ti = 0; ti < field.times.size(); ++ti)
        for (std::int64_t p = 0; p < field.lattice.size(); ++p) {
            double x[2];
            field.lattice.point(p, x);
            field.value(ti, p) = f(x[0], x[1], field.times[ti]);
        }
    return field;
}

} // namespace

TEST_CASE("constant field has zero seminorm") {
    auto field = sampled_field(17, 4, 1.0, [](double, double, double) { return 3.25; });
    CHECK(holder_seminorm(field, 0.5) == 0.0);
}

TEST_CASE("adding a constant leaves the seminorm unchanged") {
    auto f1 = sampled_field(17, 4, 1.0, [](double x, double y, double t) {
        return std::sin(x) * std::cos(0.5 * y) + 0.2 * t;
    });
    auto f2 = f1;
    for (double& v : f2.values) v += 7.75;
    CHECK(holder_seminorm(f1, 0.4) == holder_seminorm(f2, 0.4));
}

TEST_CASE("sin field seminorm against brute force") {
    const double alpha = 1.0; // min(sigma, 1) at sigma = 1
    auto field = sampled_field(13, 3, 1.0, [](double x, double, double) { return std::sin(x); });
    // brute-force oracle: all pairs on the small lattice
    double brute = 0.0;
    const std::int64_t npts = field.lattice.size();
    for (std::size_t t1 = 0; t1 < field.times.size(); ++t1)
        for (std::int64_t p1 = 0; p1 < npts; ++p1)
            for (std::size_t t2 = t1; t2 < field.times.size(); ++t2)
                for (std::int64_t p2 = (t2 == t1 ? p1 + 1 : 0); p2 < npts; ++p2) {
                    double x1[2], x2[2];
                    field.lattice.point(p1, x1);
                    field.lattice.point(p2, x2);
                    const double d = sigma_distance(x1, field.times[t1], x2, field.times[t2], 2, 1.0);
                    if (d < 1e-14) continue;
                    brute = std::max(brute, std::abs(field.value(t1, p1) - field.value(t2, p2)) /
                                                std::pow(d, alpha));
                }
    HolderOptions opt;
    opt.pair_budget = 200000;
    const double sampled = holder_seminorm(field, alpha, opt);
    CHECK(sampled <= brute * (1.0 + 1e-12)); // a sampled lower bound
    CHECK(sampled == doctest::Approx(brute).epsilon(0.10));
    // stable under doubling the budget
    opt.pair_budget = 400000;
    CHECK(holder_seminorm(field, alpha, opt) == doctest::Approx(sampled).epsilon(0.10));
}

TEST_CASE("seminorm nonincreasing in alpha for distant pairs of a bounded field") {
    auto field = sampled_field(17, 4, 1.0, [](double x, double y, double t) {
        return std::sin(2.0 * x + y) * std::cos(t);
    });
    HolderOptions opt;
    opt.min_distance = 1.0;
    const double s1 = holder_seminorm(field, 0.3, opt);
    const double s2 = holder_seminorm(field, 0.6, opt);
    const double s3 = holder_seminorm(field, 0.9, opt);
    CHECK(s1 >= s2);
    CHECK(s2 >= s3);
}

TEST_CASE("alpha must be positive") {
    auto field = sampled_field(9, 2, 1.0, [](double x, double, double) { return x; });
    CHECK_THROWS_AS(holder_seminorm(field, 0.0), validation_error);
}
