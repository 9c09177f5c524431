#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "swarmcov/geometry.hpp"
#include "swarmcov/grid.hpp"
#include "swarmcov/kernel.hpp"

namespace swarmcov {

enum class DensityKind { ring, ripple, gridded };

struct RingParams {
    double r1 = 0.0;
    double r2 = 0.0;
    double inner_weight = 0.0;
    double outer_weight = 0.0;
};

// Normalized target density rho > 0 on the rectangular domain, with the
// exact supremum bound needed by rejection sampling. Values are immutable
// after construction; evaluation is pure and safe for concurrent reads.
class TargetDensity {
public:
    DensityKind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    double normalization() const { return norm_; }
    double density_max() const { return max_; }
    const RingParams& ring_params() const { return ring_; }

    // Normalized value rho(z).
    double value(const Vec2& z) const { return unnormalized(z) / norm_; }

    double unnormalized(const Vec2& z) const {
        switch (kind_) {
        case DensityKind::ring: {
            const Vec2 d = z - domain_.center();
            const double r2 = d.norm2();
            const bool inside = r2 > ring_.r1 * ring_.r1 && r2 < ring_.r2 * ring_.r2;
            return inside ? ring_.inner_weight : ring_.outer_weight;
        }
        case DensityKind::ripple: {
            // All terms in domain-normalized coordinates. (With the radius in
            // raw inches the sine would oscillate on a sub-inch scale that no
            // practical blob radius can resolve.)
            const double w = domain_.width, h = domain_.height;
            const double u = z.x / w, v = z.y / h;
            return 2.0 + std::sin(3.0 * pi * std::sqrt(u * u + v * v)) + 2.0 * u * u + v * v * v;
        }
        case DensityKind::gridded:
            return bilinear(z);
        }
        return 0.0;
    }

    // Mass of an axis-aligned sub-rectangle, by midpoint quadrature with
    // sub-sampling at most `max_spacing` apart. Analytic paths are not worth
    // the casework here; callers that need exactly-unit totals renormalize.
    double rect_mass(const Rect& r, double max_spacing = 0.25) const {
        const int nx = std::max(1, static_cast<int>(std::ceil(r.width() / max_spacing)));
        const int ny = std::max(1, static_cast<int>(std::ceil(r.height() / max_spacing)));
        const double hx = r.width() / nx, hy = r.height() / ny;
        double acc = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double y = r.y0 + (j + 0.5) * hy;
            double row = 0.0;
            for (int i = 0; i < nx; ++i) row += value({r.x0 + (i + 0.5) * hx, y});
            acc += row;
        }
        return acc * hx * hy;
    }

    static TargetDensity ring(double w, double h, double r1, double r2,
                              double inner_weight, double outer_weight);
    static TargetDensity ripple(double w, double h);
    static TargetDensity gridded(const ScalarField& field);

private:
    TargetDensity() = default;

    double bilinear(const Vec2& z) const {
        const GridSpec& g = field_.grid;
        const double fx = std::clamp(z.x / g.dx(), 0.0, static_cast<double>(g.m1 - 1));
        const double fy = std::clamp(z.y / g.dy(), 0.0, static_cast<double>(g.m2 - 1));
        int i = std::min(g.m1 - 2, static_cast<int>(fx));
        int j = std::min(g.m2 - 2, static_cast<int>(fy));
        const double tx = fx - i, ty = fy - j;
        return (1 - tx) * (1 - ty) * field_.at(i, j) + tx * (1 - ty) * field_.at(i + 1, j) +
               (1 - tx) * ty * field_.at(i, j + 1) + tx * ty * field_.at(i + 1, j + 1);
    }

    // Simpson on cell-corner nodes; used for normalization constants that
    // have no closed form.
    double simpson_unnormalized(int m1, int m2) const {
        const GridSpec g(m1, m2, GridNodes::cell_corners, domain_);
        auto wts = [](int m) {
            std::vector<double> w(m, 0.0);
            for (int i = 0; i + 2 < m; i += 2) {
                w[i] += 1.0;
                w[i + 1] += 4.0;
                w[i + 2] += 1.0;
            }
            return w;
        };
        const std::vector<double> wx = wts(m1), wy = wts(m2);
        const double scale = g.dx() / 3.0 * g.dy() / 3.0;
        double acc = 0.0;
        for (int j = 0; j < m2; ++j) {
            double row = 0.0;
            for (int i = 0; i < m1; ++i) row += wx[i] * unnormalized(g.node(i, j));
            acc += wy[j] * row;
        }
        return acc * scale;
    }

    DensityKind kind_ = DensityKind::ring;
    Domain domain_;
    double norm_ = 1.0;
    double max_ = 0.0;
    RingParams ring_;
    ScalarField field_;
};

inline TargetDensity TargetDensity::ring(double w, double h, double r1, double r2,
                                         double inner_weight, double outer_weight) {
    if (!(r1 > 0.0) || !(r2 > r1))
        throw parameter_error("ring density: need 0 < r1 < r2");
    if (!(inner_weight > 0.0) || !(outer_weight > 0.0))
        throw parameter_error("ring density: weights must be positive");
    TargetDensity d;
    d.kind_ = DensityKind::ring;
    d.domain_ = Domain(w, h);
    d.ring_ = {r1, r2, inner_weight, outer_weight};
    const double annulus = pi * (r2 * r2 - r1 * r1);
    if (r2 <= std::min(w, h) / 2.0) {
        // annulus wholly inside the domain: exact
        d.norm_ = outer_weight * w * h + (inner_weight - outer_weight) * annulus;
    } else {
        d.norm_ = d.simpson_unnormalized(2001, 2001);
    }
    d.max_ = std::max(inner_weight, outer_weight) / d.norm_;
    return d;
}

inline TargetDensity TargetDensity::ripple(double w, double h) {
    TargetDensity d;
    d.kind_ = DensityKind::ripple;
    d.domain_ = Domain(w, h);
    d.norm_ = d.simpson_unnormalized(1001, 1001);

    // Supremum bound: scan of the normalization grid plus a Lipschitz pad
    // covering the gap between nodes. |grad| <= (3 pi sqrt(1/w^2 + 1/h^2)) + 4/w + 3/h.
    const GridSpec g(1001, 1001, GridNodes::cell_corners, d.domain_);
    double scan = 0.0;
    for (int j = 0; j < g.m2; ++j)
        for (int i = 0; i < g.m1; ++i) scan = std::max(scan, d.unnormalized(g.node(i, j)));
    const double lip = 3.0 * pi * std::sqrt(1.0 / (w * w) + 1.0 / (h * h)) + 4.0 / w + 3.0 / h;
    const double pad = lip * 0.5 * std::hypot(g.dx(), g.dy());
    d.max_ = (scan + pad) / d.norm_;
    return d;
}

inline TargetDensity TargetDensity::gridded(const ScalarField& field) {
    if (field.grid.nodes != GridNodes::cell_corners)
        throw parameter_error("gridded density: field must use cell-corner nodes");
    for (double v : field.values)
        if (!(v > 0.0)) throw parameter_error("gridded density: all values must be positive");
    TargetDensity d;
    d.kind_ = DensityKind::gridded;
    d.domain_ = field.grid.domain;
    d.field_ = field;

    // Exact integral of the bilinear interpolant: cell average of its corners.
    const GridSpec& g = field.grid;
    double acc = 0.0;
    for (int j = 0; j + 1 < g.m2; ++j) {
        double row = 0.0;
        for (int i = 0; i + 1 < g.m1; ++i)
            row += field.at(i, j) + field.at(i + 1, j) + field.at(i, j + 1) +
                   field.at(i + 1, j + 1);
        acc += row;
    }
    d.norm_ = acc * 0.25 * g.dx() * g.dy();
    d.max_ = *std::max_element(field.values.begin(), field.values.end()) / d.norm_;
    return d;
}

inline TargetDensity make_ring(double w, double h, double r1, double r2, double inner_weight,
                               double outer_weight) {
    return TargetDensity::ring(w, h, r1, r2, inner_weight, outer_weight);
}
inline TargetDensity make_ripple(double w, double h) { return TargetDensity::ripple(w, h); }
inline TargetDensity make_gridded(const ScalarField& field) {
    return TargetDensity::gridded(field);
}

// The standard 48x70in ring and ripple targets used by the tests and CLI.
inline TargetDensity reference_ring() { return make_ring(48.0, 70.0, 11.4, 20.6, 36.0, 1.0); }
inline TargetDensity reference_ripple() { return make_ripple(48.0, 70.0); }

} // namespace swarmcov
