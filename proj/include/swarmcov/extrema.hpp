#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "swarmcov/error_metric.hpp"
#include "swarmcov/parallel.hpp"
#include "swarmcov/rng.hpp"
#include "swarmcov/statistics.hpp"

namespace swarmcov {

struct OptimizerSettings {
    int max_iterations = 2500;
    double grad_tol = 1e-6;    // projected-gradient sup norm
    double f_tol = 1e-9;       // relative objective change, over 5 iterations
    double fd_step = 1e-5;     // central-difference step for verification
    double backtrack = 0.5;    // line-search shrink factor
    double armijo_c = 1e-4;
    int starts = 50;
    std::uint64_t seed = 0;
    unsigned threads = default_thread_count();

    void validate() const {
        if (!(grad_tol > 0.0) || !(f_tol > 0.0) || !(fd_step > 0.0))
            throw parameter_error("OptimizerSettings: tolerances must be positive");
        if (starts < 1) throw parameter_error("OptimizerSettings: starts must be >= 1");
        if (max_iterations < 1)
            throw parameter_error("OptimizerSettings: max_iterations must be >= 1");
        if (!(backtrack > 0.0 && backtrack < 1.0) || !(armijo_c > 0.0 && armijo_c < 1.0))
            throw parameter_error("OptimizerSettings: line-search parameters out of range");
    }
};

// Multistart initialization. `sampled` draws each start from the target
// density itself (rejection sampling), which seeds every robot where mass is
// wanted; plain-gradient descent from uniform starts tends to strand robots
// on over-covered plateaus far from the target mass.
enum class InitMode { uniform, sampled, region, given };

struct InitSpec {
    InitMode mode = InitMode::uniform;
    Rect region;              // for InitMode::region
    std::vector<Vec2> given;  // for InitMode::given (used by every start)
    double given_delta = 0.0; // joint mode: starting delta (0 = random in bounds)

    static InitSpec uniform() { return {}; }
    static InitSpec from_target() { return {InitMode::sampled, {}, {}}; }
    static InitSpec in_region(const Rect& r) { return {InitMode::region, r, {}}; }
    static InitSpec from_positions(std::vector<Vec2> p, double delta0 = 0.0) {
        return {InitMode::given, {}, std::move(p), delta0};
    }
};

struct StartRecord {
    int start = 0;
    std::uint64_t stream = 0;
    bool converged = false;
    int iterations = 0;
    double value = 0.0;
};

// One half of the extrema benchmark: the best local optimum found over the
// configured starts, with per-start provenance.
struct ExtremaHalf {
    double value = 0.0;
    SwarmConfig config;
    double delta_star = 0.0; // == config.delta; informative in joint mode
    bool any_converged = false;
    std::vector<StartRecord> records;
};

struct ExtremaResult {
    double e_minus = 0.0;
    double e_plus = 0.0;
    SwarmConfig argmin;
    SwarmConfig argmax;
    std::vector<StartRecord> min_records;
    std::vector<StartRecord> max_records;
};

namespace detail {

// Box-projected gradient descent with a Barzilai-Borwein trial step and a
// monotone Armijo backtracking line search. Variables are the 2N robot
// coordinates, optionally followed by log(delta). `sign` is +1 to minimize
// the error metric and -1 to maximize it. Feasibility is exact: iterates are
// clamped coordinate-wise every step.
class ProjectedGradient {
public:
    ProjectedGradient(ErrorEvaluator& ev, const OptimizerSettings& s, double sign,
                      bool with_delta, double log_lo, double log_hi)
        : ev_(ev), set_(s), sign_(sign), with_delta_(with_delta), log_lo_(log_lo),
          log_hi_(log_hi) {}

    // Returns (value of e, iterations, converged); x holds positions and the
    // final delta is written back through `delta`.
    StartRecord run(std::vector<Vec2>& pos, double& delta) {
        const Domain& dom = ev_.domain();
        const std::size_t n = pos.size();
        const std::size_t dim = 2 * n + (with_delta_ ? 1 : 0);
        dim_ = dim;

        std::vector<double> x(dim), g(dim), xnew(dim), gnew(dim), trial(dim);
        pack(pos, delta, x);
        project(x);

        std::vector<Vec2> scratch_pos(n), grad_pos(n);
        double d_delta = 0.0;

        auto eval = [&](const std::vector<double>& v, std::vector<double>* grad_out) {
            unpack(v, scratch_pos, delta);
            if (grad_out) {
                const double e = ev_.value_and_grad(scratch_pos, delta, grad_pos,
                                                    with_delta_ ? &d_delta : nullptr);
                for (std::size_t i = 0; i < n; ++i) {
                    (*grad_out)[2 * i] = sign_ * grad_pos[i].x;
                    (*grad_out)[2 * i + 1] = sign_ * grad_pos[i].y;
                }
                if (with_delta_) (*grad_out)[2 * n] = sign_ * d_delta * delta;
                return sign_ * e;
            }
            return sign_ * ev_.value(scratch_pos, delta);
        };

        double f = eval(x, &g);
        double step = initial_step(g);
        StartRecord rec;
        int flat_count = 0;

        int it = 0;
        for (; it < set_.max_iterations; ++it) {
            // projected-gradient stationarity measure
            double pg = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double moved = clampk(x[k] - g[k], k, dom);
                pg = std::max(pg, std::abs(x[k] - moved));
            }
            if (pg < set_.grad_tol) {
                rec.converged = true;
                break;
            }

            for (std::size_t k = 0; k < dim; ++k)
                trial[k] = clampk(x[k] - step * g[k], k, dom);
            double dir_deriv = 0.0;
            for (std::size_t k = 0; k < dim; ++k) dir_deriv += g[k] * (trial[k] - x[k]);
            if (dir_deriv > -1e-18) { // projection left no descent direction
                rec.converged = true;
                break;
            }

            double t = 1.0;
            double fnew = 0.0;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t k = 0; k < dim; ++k)
                    xnew[k] = x[k] + t * (trial[k] - x[k]);
                fnew = eval(xnew, nullptr);
                if (fnew <= f + set_.armijo_c * t * dir_deriv) {
                    accepted = true;
                    break;
                }
                t *= set_.backtrack;
            }
            if (!accepted) {
                rec.converged = true; // no descent within line-search resolution
                break;
            }

            const double fprev = f;
            f = eval(xnew, &gnew);
            // Barzilai-Borwein step for the next trial
            double ss = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double sk = xnew[k] - x[k];
                const double yk = gnew[k] - g[k];
                ss += sk * sk;
                sy += sk * yk;
            }
            step = sy > 1e-30 ? std::clamp(ss / sy, 1e-7, 1e7) : std::min(step * 2.0, 1e7);
            x.swap(xnew);
            g.swap(gnew);

            if (std::abs(fprev - f) <= set_.f_tol * (std::abs(f) + 1e-12)) {
                if (++flat_count >= 5) {
                    rec.converged = true;
                    ++it;
                    break;
                }
            } else {
                flat_count = 0;
            }
        }

        unpack(x, pos, delta);
        rec.iterations = it;
        rec.value = sign_ * f;
        return rec;
    }

private:
    void pack(const std::vector<Vec2>& pos, double delta, std::vector<double>& x) const {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            x[2 * i] = pos[i].x;
            x[2 * i + 1] = pos[i].y;
        }
        if (with_delta_) x[2 * pos.size()] = std::log(delta);
    }
    void unpack(const std::vector<double>& x, std::vector<Vec2>& pos, double& delta) const {
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = {x[2 * i], x[2 * i + 1]};
        if (with_delta_) delta = std::exp(x[2 * pos.size()]);
    }
    double clampk(double v, std::size_t k, const Domain& dom) const {
        if (with_delta_ && k == dim_ - 1) return std::clamp(v, log_lo_, log_hi_);
        return (k % 2 == 0) ? std::clamp(v, 0.0, dom.width) : std::clamp(v, 0.0, dom.height);
    }

    void project(std::vector<double>& x) const {
        const Domain& dom = ev_.domain();
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = clampk(x[k], k, dom);
    }

    double initial_step(const std::vector<double>& g) const {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        return gmax > 0.0 ? std::min(1.0 / gmax, 1e4) : 1.0;
    }

    ErrorEvaluator& ev_;
    const OptimizerSettings& set_;
    double sign_;
    bool with_delta_;
    double log_lo_, log_hi_;
    std::size_t dim_ = 0;
};

inline std::vector<Vec2> initial_positions(const InitSpec& init, std::size_t n,
                                           const TargetDensity& rho, Philox& rng) {
    const Domain& dom = rho.domain();
    std::vector<Vec2> pos(n);
    switch (init.mode) {
    case InitMode::uniform:
        for (auto& p : pos) p = {rng.uniform(0.0, dom.width), rng.uniform(0.0, dom.height)};
        break;
    case InitMode::sampled: {
        const double inv_max = 1.0 / rho.density_max();
        for (auto& p : pos) {
            for (;;) {
                const Vec2 z{rng.uniform(0.0, dom.width), rng.uniform(0.0, dom.height)};
                if (rng.uniform() < rho.value(z) * inv_max) {
                    p = z;
                    break;
                }
            }
        }
        break;
    }
    case InitMode::region: {
        const Rect r = init.region;
        if (!(r.width() > 0.0) || !(r.height() > 0.0))
            throw parameter_error("region init: empty rectangle");
        for (auto& p : pos)
            p = dom.clamp({rng.uniform(r.x0, r.x1), rng.uniform(r.y0, r.y1)});
        break;
    }
    case InitMode::given:
        if (init.given.size() != n)
            throw parameter_error("given init: expected " + std::to_string(n) +
                                  " positions, got " + std::to_string(init.given.size()));
        pos = init.given;
        for (auto& p : pos) p = dom.clamp(p);
        break;
    }
    return pos;
}

inline ExtremaHalf optimize_half(const TargetDensity& rho, std::size_t n, double delta_init,
                                 const OptimizerSettings& settings, const InitSpec& init,
                                 const QuadratureRule& rule, Kernel kernel, double sign,
                                 bool with_delta, double delta_lo, double delta_hi) {
    settings.validate();
    if (n < 1) throw parameter_error("extrema: need at least one robot");

    struct StartOut {
        StartRecord rec;
        std::vector<Vec2> pos;
        double delta = 0.0;
    };
    std::vector<StartOut> outs(settings.starts);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(settings.threads, settings.starts));
    std::vector<ErrorEvaluator> evs(workers,
                                    ErrorEvaluator(rho, rule, kernel, BlobNorm::boundary));

    parallel_for_workers(settings.starts, settings.threads, [&](std::size_t s, unsigned w) {
        Philox rng(settings.seed, s);
        StartOut& out = outs[s];
        out.pos = initial_positions(init, n, rho, rng);
        if (!with_delta)
            out.delta = delta_init;
        else if (init.given_delta > 0.0)
            out.delta = std::clamp(init.given_delta, delta_lo, delta_hi);
        else
            out.delta = delta_lo * std::exp(rng.uniform() * std::log(delta_hi / delta_lo));
        ProjectedGradient pg(evs[w], settings, sign, with_delta,
                             with_delta ? std::log(delta_lo) : 0.0,
                             with_delta ? std::log(delta_hi) : 0.0);
        out.rec = pg.run(out.pos, out.delta);
        out.rec.start = static_cast<int>(s);
        out.rec.stream = s;
    });

    ExtremaHalf half;
    half.records.reserve(outs.size());
    int best = 0;
    for (std::size_t s = 0; s < outs.size(); ++s) {
        half.records.push_back(outs[s].rec);
        half.any_converged = half.any_converged || outs[s].rec.converged;
        if (sign * outs[s].rec.value < sign * outs[best].rec.value) best = static_cast<int>(s);
    }
    half.value = outs[best].rec.value;
    half.config = SwarmConfig(outs[best].pos, outs[best].delta, kernel);
    half.delta_star = outs[best].delta;
    return half;
}

} // namespace detail

// Multistart bound on the lowest realizable error for (rho, N, delta).
inline ExtremaHalf minimize_error(const TargetDensity& rho, std::size_t n, double delta,
                                  const OptimizerSettings& settings,
                                  const InitSpec& init = InitSpec::uniform(),
                                  Kernel kernel = {}) {
    if (!(delta > 0.0)) throw parameter_error("minimize_error: delta must be positive");
    const QuadratureRule rule = default_error_rule(rho.domain(), delta);
    return detail::optimize_half(rho, n, delta, settings, init, rule, kernel, +1.0, false, 0, 0);
}

inline ExtremaHalf minimize_error(const TargetDensity& rho, std::size_t n, double delta,
                                  const OptimizerSettings& settings, const InitSpec& init,
                                  const QuadratureRule& rule, Kernel kernel = {}) {
    return detail::optimize_half(rho, n, delta, settings, init, rule, kernel, +1.0, false, 0, 0);
}

// Same machinery on -e.
inline ExtremaHalf maximize_error(const TargetDensity& rho, std::size_t n, double delta,
                                  const OptimizerSettings& settings,
                                  const InitSpec& init = InitSpec::uniform(),
                                  Kernel kernel = {}) {
    if (!(delta > 0.0)) throw parameter_error("maximize_error: delta must be positive");
    const QuadratureRule rule = default_error_rule(rho.domain(), delta);
    return detail::optimize_half(rho, n, delta, settings, init, rule, kernel, -1.0, false, 0, 0);
}

inline ExtremaHalf maximize_error(const TargetDensity& rho, std::size_t n, double delta,
                                  const OptimizerSettings& settings, const InitSpec& init,
                                  const QuadratureRule& rule, Kernel kernel = {}) {
    return detail::optimize_half(rho, n, delta, settings, init, rule, kernel, -1.0, false, 0, 0);
}

// Swarm-design problem: delta joins the decision variables (log-parameterized,
// box-projected to [lo, hi]). The quadrature grid is sized for the smallest
// admissible delta.
inline ExtremaHalf minimize_error_with_delta(const TargetDensity& rho, std::size_t n,
                                             const OptimizerSettings& settings,
                                             double delta_lo, double delta_hi,
                                             const InitSpec& init = InitSpec::uniform(),
                                             Kernel kernel = {}) {
    if (!(delta_lo > 0.0) || !(delta_hi > delta_lo))
        throw parameter_error("minimize_error_with_delta: need 0 < lo < hi");
    const QuadratureRule rule = default_error_rule(rho.domain(), delta_lo);
    return detail::optimize_half(rho, n, 0.0, settings, init, rule, kernel, +1.0, true,
                                 delta_lo, delta_hi);
}

inline ExtremaResult extrema(const TargetDensity& rho, std::size_t n, double delta,
                             const OptimizerSettings& settings,
                             const InitSpec& min_init = InitSpec::uniform(),
                             const InitSpec& max_init = InitSpec::uniform(),
                             Kernel kernel = {}) {
    ExtremaHalf lo = minimize_error(rho, n, delta, settings, min_init, kernel);
    ExtremaHalf hi = maximize_error(rho, n, delta, settings, max_init, kernel);
    ExtremaResult r;
    r.e_minus = lo.value;
    r.e_plus = hi.value;
    r.argmin = lo.config;
    r.argmax = hi.config;
    r.min_records = std::move(lo.records);
    r.max_records = std::move(hi.records);
    return r;
}

// --- design sweep -------------------------------------------------------------

struct SweepRow {
    std::size_t n = 0;
    double delta_star = 0.0;
    double e_min = 0.0;
    bool converged = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double exponent = 0.0;  // fitted p in delta* ~ C N^p
    double log_c = 0.0;     // natural-log intercept
    double kde_exponent = -1.0 / 6.0; // expected-error-optimal reference
    std::vector<SwarmConfig> argmins;
};

// Joint (positions, delta) minimization across swarm sizes. Each size after
// the first adds a warm start: the previous argmin padded with extra robots
// drawn from the target, which keeps the best-found error non-increasing in N.
inline SweepResult design_sweep(const TargetDensity& rho, const std::vector<std::size_t>& ns,
                                const OptimizerSettings& settings, double delta_lo,
                                double delta_hi, const InitSpec& init = InitSpec::uniform(),
                                Kernel kernel = {}) {
    if (ns.size() < 4) throw parameter_error("design_sweep: need at least 4 swarm sizes");
    SweepResult out;
    std::vector<Vec2> prev_argmin;
    double prev_delta = 0.0;

    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
        const std::size_t n = ns[idx];
        ExtremaHalf best;
        best.value = std::numeric_limits<double>::infinity();

        ExtremaHalf random_half =
            minimize_error_with_delta(rho, n, settings, delta_lo, delta_hi, init, kernel);
        best = random_half;

        if (!prev_argmin.empty() && n > prev_argmin.size()) {
            std::vector<Vec2> warm = prev_argmin;
            Philox rng(settings.seed ^ 0x9e3779b97f4a7c15ull, 1000 + idx);
            const double inv_max = 1.0 / rho.density_max();
            while (warm.size() < n) {
                const Vec2 z{rng.uniform(0.0, rho.domain().width),
                             rng.uniform(0.0, rho.domain().height)};
                if (rng.uniform() < rho.value(z) * inv_max) warm.push_back(z);
            }
            OptimizerSettings warm_settings = settings;
            warm_settings.starts = 1;
            ExtremaHalf warm_half = minimize_error_with_delta(
                rho, n, warm_settings, delta_lo, delta_hi,
                InitSpec::from_positions(warm, prev_delta), kernel);
            if (warm_half.value < best.value) best = warm_half;
        }

        out.rows.push_back({n, best.delta_star, best.value, best.any_converged});
        out.argmins.push_back(best.config);
        prev_argmin = best.config.positions;
        prev_delta = best.delta_star;
    }

    // least-squares fit of log delta* = log C + p log N over converged rows
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const SweepRow& r : out.rows) {
        if (!r.converged) continue;
        const double lx = std::log(static_cast<double>(r.n));
        const double ly = std::log(r.delta_star);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt < 2) throw analysis_error("design_sweep: too few converged sizes for a fit");
    const double denom = cnt * sxx - sx * sx;
    out.exponent = (cnt * sxy - sx * sy) / denom;
    out.log_c = (sy - out.exponent * sx) / cnt;
    return out;
}

} // namespace swarmcov
