#include <doctest.h>

#include <cmath>
#include <functional>

#include "swarmcov/kernel.hpp"
#include "swarmcov/special_math.hpp"

using namespace swarmcov;

namespace {

// Independent oracle for I_x(a, b): composite Simpson quadrature of the beta
// density after the substitution t = sin^2(theta), which removes the
// endpoint singularities for a, b >= 1/2. Shares nothing with the continued
// fraction path.
double ibeta_quadrature(double x, double a, double b) {
    const double theta_hi = std::asin(std::sqrt(x));
    auto f = [&](double th) {
        const double s = std::sin(th), c = std::cos(th);
        if (s <= 0.0 || c <= 0.0) {
            // limits: exponent zero at the endpoint for a or b == 1/2
            if (s <= 0.0 && 2.0 * a - 1.0 > 0.0) return 0.0;
            if (c <= 0.0 && 2.0 * b - 1.0 > 0.0) return 0.0;
        }
        return 2.0 * std::exp((2.0 * a - 1.0) * std::log(std::max(s, 1e-300)) +
                              (2.0 * b - 1.0) * std::log(std::max(c, 1e-300)) -
                              log_beta(a, b));
    };
    const int n = 200001; // composite Simpson, smooth bounded integrand
    const double h = theta_hi / (n - 1);
    double acc = f(0.0) + f(theta_hi);
    for (int i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("regularized incomplete beta against quadrature oracle") {
    // (x, a, b) pairs covering the t- and F-test regimes used downstream
    const double cases[][3] = {
        {0.5, 0.5, 0.5},     {0.3, 2.0, 5.0},    {0.9, 10.0, 2.0},  {0.2, 0.5, 499.5},
        {0.95, 49.5, 49.5},  {0.5, 599.5, 0.5},  {0.7, 3.5, 7.25},  {0.013, 0.5, 1103.7},
        {0.62, 120.0, 80.0}, {0.48, 999.5, 999.5}};
    for (const auto& c : cases) {
        const double got = regularized_incomplete_beta(c[0], c[1], c[2]);
        const double want = ibeta_quadrature(c[0], c[1], c[2]);
        CHECK(std::abs(got - want) < 1e-6);
    }
    CHECK(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
    CHECK(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, -1.0, 1.0), parameter_error);
}

TEST_CASE("student t CDF closed forms at dof 1 and 2") {
    // dof 1 is the Cauchy distribution; dof 2 also has an elementary form.
    for (double x : {-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 2.5, 8.0}) {
        CHECK(student_t_cdf(x, 1.0) ==
              doctest::Approx(0.5 + std::atan(x) / pi).epsilon(1e-12));
        CHECK(student_t_cdf(x, 2.0) ==
              doctest::Approx(0.5 + x / (2.0 * std::sqrt(2.0 + x * x))).epsilon(1e-12));
    }
}

TEST_CASE("t quantile inverts the CDF") {
    for (double dof : {1.0, 2.0, 7.5, 60.0, 2000.0}) {
        for (double p : {0.6, 0.9, 0.975, 0.999}) {
            const double q = student_t_quantile(p, dof);
            CHECK(student_t_cdf(q, dof) == doctest::Approx(p).epsilon(1e-10));
            CHECK(student_t_quantile(1.0 - p, dof) == doctest::Approx(-q).epsilon(1e-9));
        }
    }
    // the 97.5% normal quantile is the large-dof limit
    CHECK(student_t_quantile(0.975, 1e7) == doctest::Approx(1.959964).epsilon(1e-5));
}

TEST_CASE("F CDF symmetry and median") {
    // For d1 == d2 the F distribution has median exactly 1.
    for (double d : {3.0, 10.0, 99.0}) {
        CHECK(f_cdf(1.0, d, d) == doctest::Approx(0.5).epsilon(1e-12));
        // reciprocal symmetry: P(F <= x) = 1 - P(F' <= 1/x) with swapped dofs
        const double x = 2.7;
        CHECK(f_cdf(x, d, 2 * d) ==
              doctest::Approx(1.0 - f_cdf(1.0 / x, 2 * d, d)).epsilon(1e-12));
    }
    CHECK(f_cdf(0.0, 3.0, 4.0) == 0.0);
}
