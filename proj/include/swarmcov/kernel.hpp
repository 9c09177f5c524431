#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmcov/geometry.hpp"

namespace swarmcov {

inline constexpr double pi = 3.14159265358979323846264338327950;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double sqrt2 = 1.4142135623730950488016887242097;
inline constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;

// Radially symmetric unit-mass blob shapes. The Gaussian is
// G(z) = exp(-|z|^2/2) / (2 pi); the indicator is 1/pi on the unit disc.
enum class KernelKind { gaussian, indicator };

struct Kernel {
    KernelKind kind = KernelKind::gaussian;
};

inline const char* kernel_name(KernelKind k) {
    return k == KernelKind::gaussian ? "gaussian" : "indicator";
}

// K^delta(z) = K(z/delta) / delta^2, the mass-preserving rescale to radius delta.
inline double kernel_value(const Kernel& k, const Vec2& dz, double delta) {
    if (!(delta > 0.0)) throw parameter_error("kernel_value: delta must be positive");
    const double inv_d2 = 1.0 / (delta * delta);
    if (k.kind == KernelKind::gaussian)
        return std::exp(-0.5 * dz.norm2() * inv_d2) * inv_d2 / two_pi;
    return dz.norm2() <= delta * delta ? inv_d2 / pi : 0.0;
}

// Radius beyond which the kernel is treated as zero. The Gaussian tail past
// 8 delta carries mass below 1e-14.
inline double kernel_cutoff_radius(const Kernel& k, double delta) {
    return k.kind == KernelKind::gaussian ? 8.0 * delta : delta;
}

// --- clipped-disc area ----------------------------------------------------

namespace detail {

// Antiderivative of sqrt(r^2 - u^2) on [-r, r].
inline double circle_segment_antiderivative(double u, double r) {
    u = std::clamp(u, -r, r);
    return 0.5 * (u * std::sqrt(std::max(0.0, r * r - u * u)) + r * r * std::asin(u / r));
}

} // namespace detail

// Area of disc(center, r) intersected with an axis-aligned rectangle, exact
// up to rounding. The column height min(y1, cy+s) - max(y0, cy-s) with
// s = sqrt(r^2 - (x-cx)^2) is integrated piecewise between the abscissae
// where the clamping switches branch.
inline double circle_rect_area(const Vec2& center, double r, const Rect& rect) {
    if (!(r > 0.0)) return 0.0;
    const double xa = std::max(rect.x0, center.x - r);
    const double xb = std::min(rect.x1, center.x + r);
    if (xa >= xb) return 0.0;

    std::vector<double> cuts{xa, xb};
    for (double yedge : {rect.y0, rect.y1}) {
        const double d = yedge - center.y;
        if (std::abs(d) < r) {
            const double half = std::sqrt(r * r - d * d);
            for (double x : {center.x - half, center.x + half})
                if (x > xa && x < xb) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    double area = 0.0;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        if (b - a <= 0.0) continue;
        const double xm = 0.5 * (a + b);
        const double s = std::sqrt(std::max(0.0, r * r - (xm - center.x) * (xm - center.x)));
        const double top = std::min(rect.y1, center.y + s);
        const double bot = std::max(rect.y0, center.y - s);
        if (top <= bot) continue;

        const double ua = a - center.x, ub = b - center.x;
        double piece = 0.0;
        // upper boundary
        if (center.y + s <= rect.y1)
            piece += center.y * (b - a) + detail::circle_segment_antiderivative(ub, r) -
                     detail::circle_segment_antiderivative(ua, r);
        else
            piece += rect.y1 * (b - a);
        // lower boundary
        if (center.y - s >= rect.y0)
            piece -= center.y * (b - a) - (detail::circle_segment_antiderivative(ub, r) -
                                           detail::circle_segment_antiderivative(ua, r));
        else
            piece -= rect.y0 * (b - a);
        area += piece;
    }
    return area;
}

// --- per-robot domain mass and its derivatives -----------------------------

// 1-D factor of the Gaussian domain mass: integral over [0, len] of the
// unit-variance-delta Gaussian centered at x.
inline double gaussian_axis_mass(double x, double len, double delta) {
    const double s = 1.0 / (sqrt2 * delta);
    return 0.5 * (std::erf((len - x) * s) + std::erf(x * s));
}

inline double gaussian_axis_mass_dx(double x, double len, double delta) {
    const double inv = 1.0 / delta;
    const double a = x * inv, b = (len - x) * inv;
    return inv_sqrt_2pi * inv * (std::exp(-0.5 * a * a) - std::exp(-0.5 * b * b));
}

inline double gaussian_axis_mass_ddelta(double x, double len, double delta) {
    const double inv2 = 1.0 / (delta * delta);
    const double a = x, b = len - x;
    return -inv_sqrt_2pi * inv2 *
           (b * std::exp(-0.5 * b * b * inv2) + a * std::exp(-0.5 * a * a * inv2));
}

// Integral over the domain of K^delta(z - x): the denominator terms of the
// normalized blob function. Analytic for both kernels (erf product for the
// Gaussian, clipped-disc area for the indicator).
inline double kernel_domain_mass(const Kernel& k, const Domain& dom, const Vec2& x,
                                 double delta) {
    if (k.kind == KernelKind::gaussian)
        return gaussian_axis_mass(x.x, dom.width, delta) *
               gaussian_axis_mass(x.y, dom.height, delta);
    return circle_rect_area(x, delta, dom.rect()) / (pi * delta * delta);
}

inline Vec2 kernel_domain_mass_grad(const Kernel& k, const Domain& dom, const Vec2& x,
                                    double delta) {
    if (k.kind != KernelKind::gaussian)
        throw parameter_error("kernel_domain_mass_grad: analytic gradient requires the gaussian kernel");
    const double mx = gaussian_axis_mass(x.x, dom.width, delta);
    const double my = gaussian_axis_mass(x.y, dom.height, delta);
    return {gaussian_axis_mass_dx(x.x, dom.width, delta) * my,
            gaussian_axis_mass_dx(x.y, dom.height, delta) * mx};
}

inline double kernel_domain_mass_ddelta(const Kernel& k, const Domain& dom, const Vec2& x,
                                        double delta) {
    if (k.kind != KernelKind::gaussian)
        throw parameter_error("kernel_domain_mass_ddelta: requires the gaussian kernel");
    const double mx = gaussian_axis_mass(x.x, dom.width, delta);
    const double my = gaussian_axis_mass(x.y, dom.height, delta);
    return gaussian_axis_mass_ddelta(x.x, dom.width, delta) * my +
           gaussian_axis_mass_ddelta(x.y, dom.height, delta) * mx;
}

} // namespace swarmcov
