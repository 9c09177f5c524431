#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "swarmcov/grid.hpp"

namespace swarmcov {

enum class QuadKind { rectangle, trapezoid, simpson };

inline const char* quad_name(QuadKind k) {
    switch (k) {
    case QuadKind::rectangle: return "rectangle";
    case QuadKind::trapezoid: return "trapezoid";
    case QuadKind::simpson: return "simpson";
    }
    return "?";
}

// Tensor-product quadrature rule on a regular grid. Rectangle uses cell
// centers; trapezoid and Simpson use cell corners. Simpson requires an odd
// node count per axis.
struct QuadratureRule {
    QuadKind kind = QuadKind::rectangle;
    GridSpec grid;

    QuadratureRule() = default;
    QuadratureRule(QuadKind k, int m1, int m2, const Domain& dom) : kind(k) {
        const GridNodes nodes =
            k == QuadKind::rectangle ? GridNodes::cell_centers : GridNodes::cell_corners;
        grid = GridSpec(m1, m2, nodes, dom);
        if (k == QuadKind::simpson && (m1 % 2 == 0 || m2 % 2 == 0))
            throw parameter_error("simpson rule: node counts per axis must be odd");
    }

    std::vector<double> axis_weights(int axis) const {
        const int m = axis == 0 ? grid.m1 : grid.m2;
        const double h = axis == 0 ? grid.dx() : grid.dy();
        std::vector<double> w(m, h);
        switch (kind) {
        case QuadKind::rectangle:
            break;
        case QuadKind::trapezoid:
            w.front() = 0.5 * h;
            w.back() = 0.5 * h;
            break;
        case QuadKind::simpson:
            for (int i = 0; i < m; ++i) {
                if (i == 0 || i == m - 1)
                    w[i] = h / 3.0;
                else
                    w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
            }
            break;
        }
        return w;
    }
};

// Quadrature of precomputed node values. Rows accumulate independently and
// are combined in index order, so the result does not depend on how callers
// parallelize node evaluation.
inline double integrate_field(const QuadratureRule& rule, const std::vector<double>& values) {
    const GridSpec& g = rule.grid;
    if (values.size() != g.size())
        throw parameter_error("integrate_field: value count does not match rule grid");
    const std::vector<double> wx = rule.axis_weights(0);
    const std::vector<double> wy = rule.axis_weights(1);
    double acc = 0.0;
    for (int j = 0; j < g.m2; ++j) {
        double row = 0.0;
        const double* v = values.data() + g.index(0, j);
        for (int i = 0; i < g.m1; ++i) row += wx[i] * v[i];
        acc += wy[j] * row;
    }
    return acc;
}

template <typename F>
double integrate(const QuadratureRule& rule, F&& f) {
    const GridSpec& g = rule.grid;
    const std::vector<double> wx = rule.axis_weights(0);
    const std::vector<double> wy = rule.axis_weights(1);
    double acc = 0.0;
    for (int j = 0; j < g.m2; ++j) {
        double row = 0.0;
        for (int i = 0; i < g.m1; ++i) {
            const double v = f(g.node(i, j));
            if (!std::isfinite(v))
                throw analysis_error("integrate: non-finite integrand at node (" +
                                     std::to_string(i) + "," + std::to_string(j) + ") = (" +
                                     std::to_string(g.node_x(i)) + "," +
                                     std::to_string(g.node_y(j)) + ")");
            row += wx[i] * v;
        }
        acc += wy[j] * row;
    }
    return acc;
}

// --- adaptive reference ----------------------------------------------------

namespace detail {

template <typename F>
double adaptive_simpson_1d(const F& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_1d(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_1d(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth = 48) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_1d(f, a, b, fa, fm, fb, whole, tol, depth);
}

} // namespace detail

// Reference integral for convergence studies: nested 1-D adaptive Simpson
// (integrate in y for each x, then adaptively in x). Integrands of the form
// |blob - rho| have kinks along curves; the iterated form sees them as point
// kinks of a 1-D integrand, where adaptive bisection localizes quickly,
// instead of stalling on a 2-D tensor grid.
template <typename F>
double iterated_adaptive_integrate(F&& f, const Domain& dom, double rel_tol = 1e-8) {
    // Coarse magnitude estimate to convert the relative tolerance.
    double coarse = 0.0;
    {
        const int n = 33;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                coarse += f(Vec2{(i + 0.5) * dom.width / n, (j + 0.5) * dom.height / n});
        coarse *= dom.area() / (n * n);
    }
    const double abs_tol = std::max(std::abs(coarse), 1e-12) * rel_tol;
    const double inner_tol = abs_tol / (8.0 * dom.width);
    auto outer = [&](double x) {
        return detail::adaptive_simpson([&](double y) { return f(Vec2{x, y}); }, 0.0,
                                        dom.height, inner_tol);
    };
    return detail::adaptive_simpson(outer, 0.0, dom.width, abs_tol / 8.0);
}

// --- convergence study ------------------------------------------------------

struct ConvergenceRow {
    QuadKind rule;
    int m;        // nodes per axis
    double error; // |Q_m - reference|
};

struct PowerFit {
    QuadKind rule;
    double a = 0.0; // log10 intercept
    double b = 0.0; // slope: E ~ 10^a * m^b
};

struct ConvergenceStudy {
    double reference = 0.0;
    std::vector<ConvergenceRow> rows;
    std::vector<PowerFit> fits;
};

// E_m per (rule, m) against a fixed reference, with a least-squares power-law
// fit of log10 E against log10 m for each rule.
template <typename F>
ConvergenceStudy convergence_study(F&& f, const Domain& dom, const std::vector<QuadKind>& rules,
                                   const std::vector<int>& m_values, double reference) {
    if (m_values.size() < 3)
        throw parameter_error("convergence_study: need at least 3 grid sizes for a fit");
    ConvergenceStudy out;
    out.reference = reference;
    for (QuadKind rule : rules) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int m : m_values) {
            const int mm = (rule == QuadKind::simpson && m % 2 == 0) ? m + 1 : m;
            const QuadratureRule q(rule, mm, mm, dom);
            const double err = std::abs(integrate(q, f) - reference);
            out.rows.push_back({rule, mm, err});
            const double lx = std::log10(static_cast<double>(mm));
            const double ly = std::log10(std::max(err, 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        const double denom = n * sxx - sx * sx;
        PowerFit fit;
        fit.rule = rule;
        fit.b = (n * sxy - sx * sy) / denom;
        fit.a = (sy - fit.b * sx) / n;
        out.fits.push_back(fit);
    }
    return out;
}

} // namespace swarmcov
