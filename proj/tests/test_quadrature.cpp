#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "swarmcov/kernel.hpp"
#include "swarmcov/quadrature.hpp"
#include "swarmcov/rng.hpp"

using namespace swarmcov;

TEST_CASE("axis weights sum to the axis length") {
    const Domain dom(48.0, 70.0);
    for (QuadKind k : {QuadKind::rectangle, QuadKind::trapezoid, QuadKind::simpson}) {
        const QuadratureRule rule(k, 33, 47, dom);
        for (int axis : {0, 1}) {
            const auto w = rule.axis_weights(axis);
            double sum = 0.0;
            for (double v : w) sum += v;
            CHECK(sum == doctest::Approx(axis == 0 ? 48.0 : 70.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("simpson rejects even node counts") {
    const Domain dom(1.0, 1.0);
    CHECK_THROWS_AS(QuadratureRule(QuadKind::simpson, 10, 11, dom), parameter_error);
    CHECK_THROWS_AS(QuadratureRule(QuadKind::simpson, 11, 10, dom), parameter_error);
    CHECK_NOTHROW(QuadratureRule(QuadKind::simpson, 11, 11, dom));
}

TEST_CASE("constant and linear integrands are exact") {
    const Domain dom(48.0, 70.0);
    for (QuadKind k : {QuadKind::rectangle, QuadKind::trapezoid, QuadKind::simpson}) {
        const QuadratureRule rule(k, 33, 33, dom);
        CHECK(integrate(rule, [](const Vec2&) { return 1.0; }) ==
              doctest::Approx(3360.0).epsilon(1e-12));
    }
    const QuadratureRule trap(QuadKind::trapezoid, 33, 33, dom);
    CHECK(integrate(trap, [](const Vec2& z) { return z.x; }) ==
          doctest::Approx(48.0 * 48.0 / 2.0 * 70.0).epsilon(1e-12));
}

TEST_CASE("rectangle rule is exact for grid-aligned piecewise constants") {
    const Domain dom(48.0, 70.0);
    const QuadratureRule rule(QuadKind::rectangle, 32, 35, dom);
    // step at x = 24 = 16 cells of 1.5in
    auto f = [](const Vec2& z) { return z.x < 24.0 ? 3.0 : 7.0; };
    CHECK(integrate(rule, f) == doctest::Approx((3.0 + 7.0) / 2.0 * 3360.0).epsilon(1e-12));
}

TEST_CASE("linearity of the quadrature value") {
    const Domain dom(48.0, 70.0);
    const QuadratureRule rule(QuadKind::simpson, 65, 65, dom);
    auto f = [](const Vec2& z) { return std::sin(z.x / 7.0) + z.y * z.y / 100.0; };
    auto g = [](const Vec2& z) { return std::exp(-((z.x - 20) * (z.x - 20) +
                                                   (z.y - 30) * (z.y - 30)) / 200.0); };
    const double a = 2.75, b = -1.25;
    const double lhs = integrate(rule, [&](const Vec2& z) { return a * f(z) + b * g(z); });
    const double rhs = a * integrate(rule, f) + b * integrate(rule, g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("non-finite integrand names the offending node") {
    const Domain dom(10.0, 10.0);
    const QuadratureRule rule(QuadKind::rectangle, 4, 4, dom);
    auto f = [](const Vec2& z) {
        return (z.x > 5.0 && z.y > 5.0) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    };
    bool threw = false;
    try {
        integrate(rule, f);
    } catch (const analysis_error& e) {
        threw = true;
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("refinement differences shrink for continuous integrands") {
    // smooth, non-periodic integrands whose h^2 error constant is far from
    // zero, so the asymptotic regime is clean by m = 64
    const Domain dom(48.0, 70.0);
    auto wave = [](const Vec2& z) { return std::exp(z.x / 20.0) * std::sin(z.y / 9.0) + 2.0; };
    auto rational = [](const Vec2& z) { return 1.0 / (1.0 + z.x / 10.0 + z.y / 25.0); };
    for (QuadKind kind : {QuadKind::rectangle, QuadKind::trapezoid}) {
        for (auto f : {+wave, +rational}) {
            double prev = 1e300;
            for (int m : {64, 128, 256, 512}) {
                const QuadratureRule a(kind, m, m, dom);
                const QuadratureRule b(kind, 2 * m, 2 * m, dom);
                const double diff = std::abs(integrate(a, f) - integrate(b, f));
                CHECK(diff < prev);
                prev = diff;
            }
        }
    }
}

TEST_CASE("iterated adaptive integrator hits analytic references") {
    const Domain dom(48.0, 70.0);
    // gaussian bump, reference pi/4 erf(48) erf(70)
    const double ref = pi / 4.0 * std::erf(48.0) * std::erf(70.0);
    const double got = iterated_adaptive_integrate(
        [](const Vec2& z) { return std::exp(-z.norm2()); }, dom, 1e-9);
    CHECK(got == doctest::Approx(ref).epsilon(1e-8));
    // |x - c| kink: integral of |x-24| over [0,48] is 2*24^2/2 = 576, times 70
    const double got2 = iterated_adaptive_integrate(
        [](const Vec2& z) { return std::abs(z.x - 24.0); }, dom, 1e-9);
    CHECK(got2 == doctest::Approx(576.0 * 70.0).epsilon(1e-8));
}

TEST_CASE("smooth integrand attains near-nominal simpson order") {
    const Domain dom(48.0, 70.0);
    auto f = [](const Vec2& z) { return std::exp(-z.norm2()); };
    const double ref = pi / 4.0 * std::erf(48.0) * std::erf(70.0);
    const auto study =
        convergence_study(f, dom, {QuadKind::simpson}, {65, 129, 257, 513, 1025}, ref);
    REQUIRE(study.fits.size() == 1);
    CHECK(study.fits[0].b <= -3.5);
}

TEST_CASE("convergence study needs at least 3 grids") {
    const Domain dom(1.0, 1.0);
    auto f = [](const Vec2&) { return 1.0; };
    CHECK_THROWS_AS(convergence_study(f, dom, {QuadKind::rectangle}, {4, 8}, 1.0),
                    parameter_error);
}
