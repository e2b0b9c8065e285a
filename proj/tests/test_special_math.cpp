#include <doctest.h>

#include <cmath>
#include <random>

#include "meo/special_math.hpp"
#include "oracles.hpp"

using meo::CubicCoeffs;
using meo::lambert_w0;
using meo::solve_cubic_positive_root;

TEST_CASE("lambert w0 fixed points") {
    CHECK(lambert_w0(0.0) == doctest::Approx(0.0));
    CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lambert_w0(-1.0 / std::exp(1.0)) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("lambert w0 defining identity over the domain") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double lo = -1.0 / std::exp(1.0);
    for (int k = 0; k < 20000; ++k) {
        double x;
        if (k % 3 == 0) x = lo + U(rng) * 1e-6;           // branch-point neighborhood
        else if (k % 3 == 1) x = lo + U(rng) * (10.0 - lo); // spec grid
        else x = U(rng) * 1e6;                             // large arguments
        double w = lambert_w0(x);
        CHECK(w >= -1.0);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
}

TEST_CASE("lambert w0 monotone on sorted grids") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0 / std::exp(1.0), 50.0);
    std::vector<double> xs(500);
    for (auto& x : xs) x = U(rng);
    std::sort(xs.begin(), xs.end());
    double prev = lambert_w0(xs[0]);
    for (size_t i = 1; i < xs.size(); ++i) {
        double w = lambert_w0(xs[i]);
        CHECK(w >= prev - 1e-14);
        prev = w;
    }
}

TEST_CASE("lambert w0 domain error") {
    CHECK_THROWS_AS(lambert_w0(-0.5), std::domain_error);
}

TEST_CASE("cubic trivial roots") {
    // x^3 - 8 = 0
    CHECK(solve_cubic_positive_root({1.0, 0.0, 0.0, -8.0}, 0.0, 100.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // b = 0 instance: root = (theta/(2 w kappa_m))^(1/3) pattern, i.e. (-d/a)^(1/3)
    double a = 3.7e-27, d = -2.9e-2;
    double r = solve_cubic_positive_root({a, 0.0, 0.0, d}, 0.0, 1e12);
    CHECK(r == doctest::Approx(std::cbrt(-d / a)).epsilon(1e-10));
}

TEST_CASE("cubic random instances match bisection oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        // theorem-2 shaped coefficients across wide magnitude ranges
        CubicCoeffs c;
        c.a = std::pow(10.0, -30.0 + 20.0 * U(rng));
        c.b = (k % 4 == 0) ? 0.0 : std::pow(10.0, -12.0 + 14.0 * U(rng));
        c.c = 0.0;
        c.d = -std::pow(10.0, -10.0 + 16.0 * U(rng));
        double hi = 1e15;
        double r = solve_cubic_positive_root(c, 0.0, hi);
        auto f = [&](double x) { return ((c.a * x + c.b) * x + c.c) * x + c.d; };
        double guard = 1.0;
        while (f(guard) <= 0.0) guard *= 2.0;
        double rb = oracle::bisect(f, 0.0, guard);
        CHECK(r == doctest::Approx(rb).epsilon(1e-9));
        double scale = std::max({std::abs(c.a) * r * r * r, std::abs(c.b) * r * r, std::abs(c.d)});
        CHECK(std::abs(f(r)) <= 1e-9 * std::max(scale, 1e-300));
    }
}

TEST_CASE("cubic clamps to the requested bracket") {
    double r = solve_cubic_positive_root({1.0, 0.0, 0.0, -8.0}, 3.0, 10.0);
    CHECK(r == doctest::Approx(3.0));
    r = solve_cubic_positive_root({1.0, 0.0, 0.0, -8.0}, 0.0, 1.5);
    CHECK(r == doctest::Approx(1.5));
}
