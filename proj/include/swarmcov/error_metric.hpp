#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "swarmcov/density.hpp"
#include "swarmcov/geometry.hpp"
#include "swarmcov/kernel.hpp"
#include "swarmcov/quadrature.hpp"

namespace swarmcov {

// N robot positions plus the blob radius and shape that turn them into a
// continuous swarm density.
struct SwarmConfig {
    std::vector<Vec2> positions;
    double delta = 1.0;
    Kernel kernel;

    SwarmConfig() = default;
    SwarmConfig(std::vector<Vec2> pos, double d, Kernel k = {})
        : positions(std::move(pos)), delta(d), kernel(k) {
        if (positions.empty()) throw parameter_error("SwarmConfig: need at least one robot");
        if (!(delta > 0.0)) throw parameter_error("SwarmConfig: delta must be positive");
    }
    std::size_t size() const { return positions.size(); }
};

inline void require_in_domain(const std::vector<Vec2>& positions, const Domain& dom) {
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (!dom.contains(positions[i]))
            throw parameter_error("robot " + std::to_string(i) + " at (" +
                                  std::to_string(positions[i].x) + "," +
                                  std::to_string(positions[i].y) + ") is outside the domain");
}

// Time-stamped snapshots of a constant-size swarm.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> snapshots;
    double delta = 1.0;
    Kernel kernel;

    void validate() const {
        if (times.empty() || times.size() != snapshots.size())
            throw parameter_error("Trajectory: need one snapshot per time stamp");
        for (std::size_t j = 1; j < times.size(); ++j)
            if (!(times[j] > times[j - 1]))
                throw parameter_error("Trajectory: times must be strictly increasing");
        for (const auto& s : snapshots)
            if (s.size() != snapshots.front().size())
                throw parameter_error("Trajectory: snapshot sizes differ");
        if (!(delta > 0.0)) throw parameter_error("Trajectory: delta must be positive");
    }
};

// Regular M1 x M2 tiling of the domain. A robot on a shared edge belongs to
// the left/bottom cell.
struct Partition {
    int m1 = 1;
    int m2 = 1;
    Domain domain;

    Partition() = default;
    Partition(int m1_, int m2_, const Domain& dom) : m1(m1_), m2(m2_), domain(dom) {
        if (m1 < 1 || m2 < 1) throw parameter_error("Partition: tiling counts must be >= 1");
    }

    int cells() const { return m1 * m2; }
    Rect cell(int i, int j) const {
        const double cw = domain.width / m1, ch = domain.height / m2;
        return {i * cw, j * ch, (i + 1) * cw, (j + 1) * ch};
    }
    int cell_index(const Vec2& z) const {
        auto side = [](double v, int m, double len) {
            const double t = v * m / len;
            const int i = static_cast<int>(std::ceil(t)) - 1;
            return std::clamp(i, 0, m - 1);
        };
        return side(z.y, m2, domain.height) * m1 + side(z.x, m1, domain.width);
    }
};

// Which denominator normalizes the blob sum. `boundary` divides by the total
// in-domain kernel mass (the exact normalization; the field then integrates
// to 1 over the domain). `count` divides by N, the small-delta limit of the
// same quantity; the sampling-distribution machinery is defined with this
// one. For blobs a few radii inside the boundary the two differ by well
// under a percent.
enum class BlobNorm { boundary, count };

namespace detail {

// Canonical robot order: coordinates sorted lexicographically. All per-robot
// sums run in this order, which makes results exactly invariant under
// permutation of the input positions.
inline std::vector<std::size_t> canonical_order(const std::vector<Vec2>& pos) {
    std::vector<std::size_t> idx(pos.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pos[a].x != pos[b].x) return pos[a].x < pos[b].x;
        if (pos[a].y != pos[b].y) return pos[a].y < pos[b].y;
        return a < b;
    });
    return idx;
}

} // namespace detail

inline double blob_denominator(const std::vector<Vec2>& positions, double delta, Kernel kernel,
                               const Domain& dom, BlobNorm norm) {
    if (norm == BlobNorm::count) return static_cast<double>(positions.size());
    const auto order = detail::canonical_order(positions);
    double d = 0.0;
    for (std::size_t idx : order)
        d += kernel_domain_mass(kernel, dom, positions[idx], delta);
    return d;
}

// Pointwise swarm blob value. The grid-based evaluator below is the fast
// path; this one serves adaptive quadrature and spot checks.
inline double blob_at(const SwarmConfig& cfg, const Domain& dom, const Vec2& z,
                      BlobNorm norm = BlobNorm::boundary) {
    const double cutoff = kernel_cutoff_radius(cfg.kernel, cfg.delta);
    const double cut2 = cutoff * cutoff;
    const auto order = detail::canonical_order(cfg.positions);
    double sum = 0.0;
    for (std::size_t idx : order) {
        const Vec2 dzv = z - cfg.positions[idx];
        if (dzv.norm2() <= cut2) sum += kernel_value(cfg.kernel, dzv, cfg.delta);
    }
    return sum / blob_denominator(cfg.positions, cfg.delta, cfg.kernel, dom, norm);
}

inline double blob_function(const SwarmConfig& cfg, const Domain& dom, const Vec2& z,
                            BlobNorm norm = BlobNorm::boundary) {
    if (!dom.contains(z)) throw parameter_error("blob_function: point outside the domain");
    return blob_at(cfg, dom, z, norm);
}

// Caches the canonical order and denominator for repeated pointwise
// evaluation (adaptive quadrature, convergence studies).
class BlobPointEvaluator {
public:
    BlobPointEvaluator(const SwarmConfig& cfg, const Domain& dom,
                       BlobNorm norm = BlobNorm::boundary)
        : kernel_(cfg.kernel), delta_(cfg.delta),
          cut2_(kernel_cutoff_radius(cfg.kernel, cfg.delta) *
                kernel_cutoff_radius(cfg.kernel, cfg.delta)),
          inv_d_(1.0 / blob_denominator(cfg.positions, cfg.delta, cfg.kernel, dom, norm)) {
        const auto order = detail::canonical_order(cfg.positions);
        sorted_.reserve(cfg.positions.size());
        for (std::size_t idx : order) sorted_.push_back(cfg.positions[idx]);
    }

    double operator()(const Vec2& z) const {
        double sum = 0.0;
        for (const Vec2& p : sorted_) {
            const Vec2 dz = z - p;
            if (dz.norm2() <= cut2_) sum += kernel_value(kernel_, dz, delta_);
        }
        return sum * inv_d_;
    }

private:
    Kernel kernel_;
    double delta_;
    double cut2_;
    double inv_d_;
    std::vector<Vec2> sorted_;
};

// Evaluates the error metric (and its gradient) for many configurations
// against one fixed target and quadrature rule. Target values and weights
// are cached at construction; per-robot kernel windows are accumulated with
// separated 1-D Gaussian factors, so a field build costs O(N * window) with
// no exp calls in the inner loop. Holds scratch buffers: use one evaluator
// per thread.
class ErrorEvaluator {
public:
    ErrorEvaluator(const TargetDensity& rho, const QuadratureRule& rule, Kernel kernel,
                   BlobNorm norm = BlobNorm::boundary)
        : rule_(rule), kernel_(kernel), norm_(norm), domain_(rho.domain()) {
        if (!(rule.grid.domain == rho.domain()))
            throw parameter_error("ErrorEvaluator: rule grid and target domain differ");
        const GridSpec& g = rule_.grid;
        rho_grid_.resize(g.size());
        for (int j = 0; j < g.m2; ++j)
            for (int i = 0; i < g.m1; ++i) rho_grid_[g.index(i, j)] = rho.value(g.node(i, j));
        wx_ = rule_.axis_weights(0);
        wy_ = rule_.axis_weights(1);
        field_.resize(g.size());
    }

    const QuadratureRule& rule() const { return rule_; }
    const Domain& domain() const { return domain_; }
    Kernel kernel() const { return kernel_; }
    BlobNorm norm() const { return norm_; }

    // e = integral |rho_N - rho|, in [0, 2].
    double value(const std::vector<Vec2>& positions, double delta) {
        build_field(positions, delta);
        const double invD = 1.0 / blob_denominator(positions, delta, kernel_, domain_, norm_);
        const GridSpec& g = rule_.grid;
        double acc = 0.0;
        for (int j = 0; j < g.m2; ++j) {
            const double* f = field_.data() + g.index(0, j);
            const double* r = rho_grid_.data() + g.index(0, j);
            double row = 0.0;
            for (int i = 0; i < g.m1; ++i) row += wx_[i] * std::abs(f[i] * invD - r[i]);
            acc += wy_[j] * row;
        }
        return check_range(acc);
    }

    // One-sided error over the under-covered region {rho_N <= rho}; equals e/2
    // up to quadrature error.
    double one_sided(const std::vector<Vec2>& positions, double delta) {
        build_field(positions, delta);
        const double invD = 1.0 / blob_denominator(positions, delta, kernel_, domain_, norm_);
        const GridSpec& g = rule_.grid;
        double acc = 0.0;
        for (int j = 0; j < g.m2; ++j) {
            const double* f = field_.data() + g.index(0, j);
            const double* r = rho_grid_.data() + g.index(0, j);
            double row = 0.0;
            for (int i = 0; i < g.m1; ++i) {
                const double d = r[i] - f[i] * invD;
                if (d >= 0.0) row += wx_[i] * d;
            }
            acc += wy_[j] * row;
        }
        return acc;
    }

    // Value plus the almost-everywhere gradient
    //   de/dx_i = integral sign(rho_N - rho) * d(rho_N)/dx_i,
    // evaluated on the rule grid (the integrand derivative is exact, so this
    // is also the exact gradient of the discretized objective away from
    // sign-change nodes). Gaussian kernel only. If d_delta is non-null it
    // receives de/d(delta).
    double value_and_grad(const std::vector<Vec2>& positions, double delta,
                          std::vector<Vec2>& grad, double* d_delta = nullptr) {
        if (kernel_.kind != KernelKind::gaussian)
            throw parameter_error("error gradient: requires the gaussian kernel");
        build_field(positions, delta);
        const std::size_t n = positions.size();
        const double D = blob_denominator(positions, delta, kernel_, domain_, norm_);
        const double invD = 1.0 / D;
        const GridSpec& g = rule_.grid;

        // Value, plus T = integral sign * rho_N (one scalar shared by every
        // robot's denominator term).
        double acc = 0.0, T = 0.0;
        for (int j = 0; j < g.m2; ++j) {
            const double* f = field_.data() + g.index(0, j);
            const double* r = rho_grid_.data() + g.index(0, j);
            double row = 0.0, rowT = 0.0;
            for (int i = 0; i < g.m1; ++i) {
                const double bn = f[i] * invD;
                const double d = bn - r[i];
                const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                row += wx_[i] * std::abs(d);
                rowT += wx_[i] * s * bn;
            }
            acc += wy_[j] * row;
            T += wy_[j] * rowT;
        }

        grad.assign(n, Vec2{});
        const double scale = 1.0 / (two_pi * delta * delta);
        const double inv_d2 = 1.0 / (delta * delta);
        const double cutoff = kernel_cutoff_radius(kernel_, delta);
        double dF_ddelta = 0.0, dD_ddelta = 0.0;

        const auto order = detail::canonical_order(positions);
        for (std::size_t idx : order) {
            const Vec2 p = positions[idx];
            const Window w = window(p, cutoff);
            if (w.i_hi < w.i_lo || w.j_hi < w.j_lo) continue;
            fill_axis(gx_, gxd_, w.i_lo, w.i_hi, p.x, delta, /*x_axis=*/true);
            fill_axis(gy_, gyd_, w.j_lo, w.j_hi, p.y, delta, /*x_axis=*/false);

            double ax = 0.0, ay = 0.0, ar2 = 0.0, ap = 0.0;
            for (int j = w.j_lo; j <= w.j_hi; ++j) {
                const std::size_t base = g.index(0, j);
                const double* f = field_.data() + base;
                const double* r = rho_grid_.data() + base;
                const double yv = g.node_y(j) - p.y;
                double sx = 0.0, sp = 0.0, sdx2 = 0.0;
                for (int i = w.i_lo; i <= w.i_hi; ++i) {
                    const double d = f[i] * invD - r[i];
                    if (d == 0.0) continue;
                    const double ws = d > 0.0 ? wx_[i] : -wx_[i];
                    const double gxv = gx_[i - w.i_lo];
                    sx += ws * gxd_[i - w.i_lo];
                    sp += ws * gxv;
                    if (d_delta) {
                        const double xv = g.node_x(i) - p.x;
                        sdx2 += ws * gxv * xv * xv;
                    }
                }
                const double gyv = gy_[j - w.j_lo];
                ax += wy_[j] * gyv * sx;
                ay += wy_[j] * gyd_[j - w.j_lo] * sp;
                if (d_delta) {
                    ar2 += wy_[j] * (gyv * sdx2 + gyv * yv * yv * sp);
                    ap += wy_[j] * gyv * sp;
                }
            }
            // d(phi)/dx = phi * (z - x)/delta^2; gxd/gyd already carry (z-x).
            Vec2 gi{scale * inv_d2 * ax, scale * inv_d2 * ay};
            if (norm_ == BlobNorm::boundary) {
                const Vec2 dm = kernel_domain_mass_grad(kernel_, domain_, p, delta);
                gi.x -= T * dm.x;
                gi.y -= T * dm.y;
                if (d_delta) dD_ddelta += kernel_domain_mass_ddelta(kernel_, domain_, p, delta);
            }
            grad[idx] = gi * invD;
            if (d_delta)
                dF_ddelta += scale * (ar2 * inv_d2 / delta - 2.0 / delta * ap);
        }
        if (d_delta) *d_delta = (dF_ddelta - T * dD_ddelta) * invD;
        return check_range(acc);
    }

    // Exposes the raw field build for the cumulative metric and diagnostics:
    // writes sum_i K^delta(z_k - x_i) into out (no normalization).
    void raw_field(const std::vector<Vec2>& positions, double delta, std::vector<double>& out) {
        build_field(positions, delta);
        out = field_;
    }

    const std::vector<double>& target_grid() const { return rho_grid_; }

    double integrate_values(const std::vector<double>& v) const {
        return integrate_field(rule_, v);
    }

private:
    struct Window {
        int i_lo, i_hi, j_lo, j_hi;
    };

    Window window(const Vec2& p, double cutoff) const {
        const GridSpec& g = rule_.grid;
        auto lo = [](double v, double origin, double h, int m) {
            const int i = static_cast<int>(std::ceil((v - origin) / h));
            return std::clamp(i, 0, m - 1);
        };
        auto hi = [](double v, double origin, double h, int m) {
            const int i = static_cast<int>(std::floor((v - origin) / h));
            return std::clamp(i, 0, m - 1);
        };
        return {lo(p.x - cutoff, g.x0(), g.dx(), g.m1), hi(p.x + cutoff, g.x0(), g.dx(), g.m1),
                lo(p.y - cutoff, g.y0(), g.dy(), g.m2), hi(p.y + cutoff, g.y0(), g.dy(), g.m2)};
    }

    void fill_axis(std::vector<double>& gv, std::vector<double>& gd, int lo, int hi, double c,
                   double delta, bool x_axis) {
        const GridSpec& g = rule_.grid;
        gv.resize(hi - lo + 1);
        gd.resize(hi - lo + 1);
        const double inv = 1.0 / delta;
        for (int i = lo; i <= hi; ++i) {
            const double u = ((x_axis ? g.node_x(i) : g.node_y(i)) - c);
            const double t = u * inv;
            gv[i - lo] = std::exp(-0.5 * t * t);
            gd[i - lo] = gv[i - lo] * u;
        }
    }

    void build_field(const std::vector<Vec2>& positions, double delta) {
        if (positions.empty()) throw parameter_error("blob field: no robots");
        if (!(delta > 0.0)) throw parameter_error("blob field: delta must be positive");
        require_in_domain(positions, domain_);
        const GridSpec& g = rule_.grid;
        std::fill(field_.begin(), field_.end(), 0.0);
        const double cutoff = kernel_cutoff_radius(kernel_, delta);
        const auto order = detail::canonical_order(positions);
        if (kernel_.kind == KernelKind::gaussian) {
            const double scale = 1.0 / (two_pi * delta * delta);
            for (std::size_t idx : order) {
                const Vec2 p = positions[idx];
                const Window w = window(p, cutoff);
                if (w.i_hi < w.i_lo || w.j_hi < w.j_lo) continue;
                fill_axis(gx_, gxd_, w.i_lo, w.i_hi, p.x, delta, true);
                fill_axis(gy_, gyd_, w.j_lo, w.j_hi, p.y, delta, false);
                for (int j = w.j_lo; j <= w.j_hi; ++j) {
                    double* f = field_.data() + g.index(0, j) + w.i_lo;
                    const double gyv = gy_[j - w.j_lo] * scale;
                    const int nx = w.i_hi - w.i_lo;
                    for (int i = 0; i <= nx; ++i) f[i] += gx_[i] * gyv;
                }
            }
        } else {
            const double v = 1.0 / (pi * delta * delta);
            const double cut2 = delta * delta;
            for (std::size_t idx : order) {
                const Vec2 p = positions[idx];
                const Window w = window(p, cutoff);
                for (int j = w.j_lo; j <= w.j_hi; ++j) {
                    double* f = field_.data() + g.index(0, j);
                    const double dy = g.node_y(j) - p.y;
                    for (int i = w.i_lo; i <= w.i_hi; ++i) {
                        const double dx = g.node_x(i) - p.x;
                        if (dx * dx + dy * dy <= cut2) f[i] += v;
                    }
                }
            }
        }
    }

    double check_range(double e) const {
        if (e > 2.0 + 1e-6)
            throw analysis_error("error metric " + std::to_string(e) +
                                 " exceeds 2: quadrature grid too coarse for this delta");
        return std::min(e, 2.0);
    }

    QuadratureRule rule_;
    Kernel kernel_;
    BlobNorm norm_;
    Domain domain_;
    std::vector<double> rho_grid_, wx_, wy_, field_;
    std::vector<double> gx_, gy_, gxd_, gyd_;
};

// Production default: rectangle rule on cell centers with spacing at most
// min(delta/4, cap). Coverage metrics do not need tight quadrature, and the
// rectangle rule is insensitive to the |.| kinks.
inline QuadratureRule default_error_rule(const Domain& dom, double delta, double cap = 0.5) {
    const double s = std::min(delta / 4.0, cap);
    const int m1 = std::max(2, static_cast<int>(std::ceil(dom.width / s)));
    const int m2 = std::max(2, static_cast<int>(std::ceil(dom.height / s)));
    return QuadratureRule(QuadKind::rectangle, m1, m2, dom);
}

inline double error(const SwarmConfig& cfg, const TargetDensity& rho,
                    const QuadratureRule& rule, BlobNorm norm = BlobNorm::boundary) {
    ErrorEvaluator ev(rho, rule, cfg.kernel, norm);
    return ev.value(cfg.positions, cfg.delta);
}

inline double error(const SwarmConfig& cfg, const TargetDensity& rho,
                    BlobNorm norm = BlobNorm::boundary) {
    return error(cfg, rho, default_error_rule(rho.domain(), cfg.delta), norm);
}

inline double one_sided_error(const SwarmConfig& cfg, const TargetDensity& rho,
                              const QuadratureRule& rule, BlobNorm norm = BlobNorm::boundary) {
    ErrorEvaluator ev(rho, rule, cfg.kernel, norm);
    return ev.one_sided(cfg.positions, cfg.delta);
}

// Time-averaged variant: L1 distance between the mean of the per-snapshot
// normalized fields and the target.
inline double cumulative_error(const Trajectory& traj, const TargetDensity& rho,
                               const QuadratureRule& rule, BlobNorm norm = BlobNorm::boundary) {
    traj.validate();
    ErrorEvaluator ev(rho, rule, traj.kernel, norm);
    const std::size_t M = traj.snapshots.size();
    std::vector<double> mean(rule.grid.size(), 0.0), raw;
    for (const auto& snap : traj.snapshots) {
        require_in_domain(snap, rho.domain());
        ev.raw_field(snap, traj.delta, raw);
        const double c =
            1.0 / (blob_denominator(snap, traj.delta, traj.kernel, rho.domain(), norm) * M);
        for (std::size_t k = 0; k < raw.size(); ++k) mean[k] += raw[k] * c;
    }
    const std::vector<double>& rg = ev.target_grid();
    std::vector<double> diff(mean.size());
    for (std::size_t k = 0; k < mean.size(); ++k) diff[k] = std::abs(mean[k] - rg[k]);
    const double e = integrate_field(rule, diff);
    if (e > 2.0 + 1e-6)
        throw analysis_error("cumulative error exceeds 2: quadrature grid too coarse");
    return std::min(e, 2.0);
}

// mu = sum over cells |target cell mass - robot fraction|. Cell masses are
// normalized to unit total so the M=1 tiling gives exactly zero.
inline double discretization_error(const std::vector<Vec2>& positions, const TargetDensity& rho,
                                   const Partition& part, double mass_spacing = 0.1) {
    if (!(part.domain == rho.domain()))
        throw parameter_error("discretization_error: partition does not tile the target domain");
    require_in_domain(positions, rho.domain());

    std::vector<double> mass(part.cells());
    double total = 0.0;
    for (int j = 0; j < part.m2; ++j)
        for (int i = 0; i < part.m1; ++i) {
            const double m = rho.rect_mass(part.cell(i, j), mass_spacing);
            mass[static_cast<std::size_t>(j) * part.m1 + i] = m;
            total += m;
        }

    std::vector<int> counts(part.cells(), 0);
    for (const Vec2& p : positions) ++counts[part.cell_index(p)];

    const double invN = 1.0 / static_cast<double>(positions.size());
    double mu = 0.0;
    for (int c = 0; c < part.cells(); ++c)
        mu += std::abs(mass[c] / total - counts[c] * invN);
    return mu;
}

struct PitfallRow {
    int m1, m2;
    double mu;
};

// mu across a list of tilings of the same domain; demonstrates how strongly
// the discretized metric depends on the tiling choice.
inline std::vector<PitfallRow> pitfall_report(const std::vector<Vec2>& positions,
                                              const TargetDensity& rho,
                                              const std::vector<std::pair<int, int>>& tilings) {
    std::vector<PitfallRow> rows;
    rows.reserve(tilings.size());
    for (auto [m1, m2] : tilings) {
        const Partition part(m1, m2, rho.domain());
        rows.push_back({m1, m2, discretization_error(positions, rho, part)});
    }
    return rows;
}

} // namespace swarmcov
