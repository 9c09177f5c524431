#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "swarmcov/density.hpp"
#include "swarmcov/error_metric.hpp"
#include "swarmcov/parallel.hpp"
#include "swarmcov/rng.hpp"
#include "swarmcov/special_math.hpp"

namespace swarmcov {

inline double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw parameter_error("sample_variance: need at least 2 samples");
    const double m = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

inline double sample_sd(const std::vector<double>& v) { return std::sqrt(sample_variance(v)); }

// Third quartile with linear interpolation between order statistics.
inline double quartile3(std::vector<double> v) {
    if (v.empty()) throw parameter_error("quartile3: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = 0.75 * static_cast<double>(v.size() - 1);
    const std::size_t k = static_cast<std::size_t>(pos);
    if (k + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(k);
    return v[k] + frac * (v[k + 1] - v[k]);
}

// --- position sampling -------------------------------------------------------

// N i.i.d. draws from rho by rejection: uniform proposals on the domain,
// accepted with probability rho/rho_max. Stream-keyed, so draw j of a Monte
// Carlo run is the same whether computed serially or in parallel.
inline std::vector<Vec2> sample_positions(const TargetDensity& rho, std::size_t n,
                                          std::uint64_t seed, std::uint64_t stream = 0) {
    if (n == 0) throw parameter_error("sample_positions: n must be >= 1");
    Philox rng(seed, stream);
    const Domain& dom = rho.domain();
    const double inv_max = 1.0 / rho.density_max();
    std::vector<Vec2> out;
    out.reserve(n);
    std::uint64_t proposals = 0, window_accepts = 0;
    while (out.size() < n) {
        const Vec2 z{rng.uniform(0.0, dom.width), rng.uniform(0.0, dom.height)};
        const double u = rng.uniform();
        ++proposals;
        if (u < rho.value(z) * inv_max) {
            out.push_back(z);
            ++window_accepts;
        }
        if (proposals % 1000000 == 0) {
            if (window_accepts < 100)
                throw analysis_error("sample_positions: acceptance rate below 1e-4; "
                                     "density too peaked for rejection sampling");
            window_accepts = 0;
        }
    }
    return out;
}

// --- normal CDF fit ----------------------------------------------------------

struct NormalCdfFit {
    double mu = 0.0;
    double sigma = 1.0;
    double rms = 0.0; // residual RMS of the fit
};

// Least-squares fit of Phi((x - mu)/sigma) to the empirical CDF plotting
// positions k/n over the sorted sample. Gauss-Newton from the sample
// moments; a handful of iterations is plenty for these well-behaved
// residuals.
inline NormalCdfFit fit_normal_cdf(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n < 4) throw parameter_error("fit_normal_cdf: need at least 4 samples");
    double mu = sample_mean(sorted);
    double sigma = std::max(sample_sd(sorted), 1e-12);

    auto rms_at = [&](double m, double s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double r = normal_cdf((sorted[k] - m) / s) -
                             static_cast<double>(k + 1) / static_cast<double>(n);
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(n));
    };

    double best = rms_at(mu, sigma);
    for (int it = 0; it < 60; ++it) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double z = (sorted[k] - mu) / sigma;
            const double pdf = inv_sqrt_2pi * std::exp(-0.5 * z * z);
            const double r = normal_cdf(z) - static_cast<double>(k + 1) / static_cast<double>(n);
            const double jm = -pdf / sigma;   // d resid / d mu
            const double js = -pdf * z / sigma; // d resid / d sigma
            jtj00 += jm * jm;
            jtj01 += jm * js;
            jtj11 += js * js;
            jtr0 += jm * r;
            jtr1 += js * r;
        }
        const double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-30) break;
        double dmu = -(jtj11 * jtr0 - jtj01 * jtr1) / det;
        double dsg = -(jtj00 * jtr1 - jtj01 * jtr0) / det;
        double step = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 20; ++ls) {
            const double m2 = mu + step * dmu;
            const double s2 = std::max(sigma + step * dsg, 1e-12);
            const double r2 = rms_at(m2, s2);
            if (r2 < best) {
                mu = m2;
                sigma = s2;
                best = r2;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return {mu, sigma, best};
}

// --- error distribution ------------------------------------------------------

// Monte Carlo estimate of the error-metric sampling distribution: M draws of
// N positions from rho, one error value each, plus an erf fit to the
// empirical CDF. Uses the count normalization (denominator N), which is how
// the sampling distribution is defined.
struct ErrorDistribution {
    std::vector<double> samples; // sorted
    double mu_hat = 0.0;         // erf-fit mean
    double sigma_hat = 0.0;      // erf-fit std
    double fit_rms = 0.0;
    double mean = 0.0; // raw sample moments
    double sd = 0.0;
    bool approx_normal = false;

    std::size_t size() const { return samples.size(); }
};

inline ErrorDistribution make_error_distribution(std::vector<double> samples) {
    if (samples.size() < 30)
        throw parameter_error("ErrorDistribution: need at least 30 samples");
    std::sort(samples.begin(), samples.end());
    for (double e : samples)
        if (!(e >= 0.0 && e <= 2.0))
            throw parameter_error("ErrorDistribution: sample outside [0, 2]");
    ErrorDistribution dist;
    dist.mean = sample_mean(samples);
    dist.sd = sample_sd(samples);
    const NormalCdfFit fit = fit_normal_cdf(samples);
    dist.mu_hat = fit.mu;
    dist.sigma_hat = fit.sigma;
    dist.fit_rms = fit.rms;
    dist.approx_normal = fit.rms <= 0.05;
    dist.samples = std::move(samples);
    if (!(dist.sigma_hat > 0.0))
        throw analysis_error("ErrorDistribution: degenerate fitted sigma");
    return dist;
}

inline ErrorDistribution estimate_error_distribution(const TargetDensity& rho, std::size_t n,
                                                     double delta, Kernel kernel, std::size_t m,
                                                     const QuadratureRule& rule,
                                                     std::uint64_t seed,
                                                     unsigned threads = default_thread_count()) {
    if (m < 30) throw parameter_error("estimate_error_distribution: need M >= 30");
    std::vector<double> samples(m, 0.0);
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
    std::vector<ErrorEvaluator> evs(workers, ErrorEvaluator(rho, rule, kernel, BlobNorm::count));
    parallel_for_workers(m, threads, [&](std::size_t j, unsigned w) {
        const std::vector<Vec2> pos = sample_positions(rho, n, seed, j);
        samples[j] = evs[w].value(pos, delta);
    });
    return make_error_distribution(std::move(samples));
}

// --- two-sample tests --------------------------------------------------------

struct FTestResult {
    double statistic = 1.0; // larger variance over smaller, >= 1
    double dof1 = 0.0;
    double dof2 = 0.0;
    double p = 1.0; // two-tailed
};

inline FTestResult two_sample_f_test(const std::vector<double>& a,
                                     const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw parameter_error("two_sample_f_test: need >= 2 samples per set");
    const double va = sample_variance(a), vb = sample_variance(b);
    if (!(va > 0.0) || !(vb > 0.0))
        throw analysis_error("two_sample_f_test: zero variance sample set");
    FTestResult r;
    if (va >= vb) {
        r.statistic = va / vb;
        r.dof1 = static_cast<double>(a.size() - 1);
        r.dof2 = static_cast<double>(b.size() - 1);
    } else {
        r.statistic = vb / va;
        r.dof1 = static_cast<double>(b.size() - 1);
        r.dof2 = static_cast<double>(a.size() - 1);
    }
    r.p = std::min(1.0, 2.0 * (1.0 - f_cdf(r.statistic, r.dof1, r.dof2)));
    return r;
}

struct TTestResult {
    double statistic = 0.0; // sign of mean(a) - mean(b)
    double dof = 0.0;       // Welch-Satterthwaite
    double p = 1.0;         // two-tailed
    double ci_lo = 0.0;     // 95% CI for mean(a) - mean(b)
    double ci_hi = 0.0;
};

// Welch's t-test (unequal variances).
inline TTestResult two_sample_t_test(const std::vector<double>& a,
                                     const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw parameter_error("two_sample_t_test: need >= 2 samples per set");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na, vb = sample_variance(b) / nb;
    if (!(va + vb > 0.0)) throw analysis_error("two_sample_t_test: zero variance samples");
    TTestResult r;
    const double diff = sample_mean(a) - sample_mean(b);
    const double se = std::sqrt(va + vb);
    r.statistic = diff / se;
    r.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p = std::min(1.0, 2.0 * (1.0 - student_t_cdf(std::abs(r.statistic), r.dof)));
    const double tq = student_t_quantile(0.975, r.dof);
    r.ci_lo = diff - tq * se;
    r.ci_hi = diff + tq * se;
    return r;
}

// --- settling-time analysis ---------------------------------------------------

// Exponential settle fit f(t) = alpha + beta exp(-t/tau) with t_s = 4 tau
// (the 2% settling convention), and the third quartile of the error past t_s.
struct SettlingAnalysis {
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 0.0;
    double t_settle = 0.0;
    double e_q3 = 0.0;
    bool degenerate = false; // flat series: tau unidentifiable
};

namespace detail {

// For fixed tau the model is linear in (alpha, beta); solve the 2x2 normal
// equations and return the SSE.
inline double settle_sse(const std::vector<double>& t, const std::vector<double>& e, double tau,
                         double& alpha, double& beta) {
    const std::size_t n = t.size();
    double su = 0, suu = 0, se = 0, sue = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::exp(-t[i] / tau);
        su += u;
        suu += u * u;
        se += e[i];
        sue += u * e[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * suu - su * su;
    if (std::abs(det) < 1e-300) {
        alpha = se / nn;
        beta = 0.0;
    } else {
        beta = (nn * sue - su * se) / det;
        alpha = (se - beta * su) / nn;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = alpha + beta * std::exp(-t[i] / tau) - e[i];
        sse += r * r;
    }
    return sse;
}

} // namespace detail

inline SettlingAnalysis settling_analysis(const std::vector<double>& t,
                                          const std::vector<double>& e) {
    if (t.size() < 10) throw parameter_error("settling_analysis: need at least 10 points");
    if (t.size() != e.size()) throw parameter_error("settling_analysis: size mismatch");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw parameter_error("settling_analysis: times must be strictly increasing");

    const double span = t.back() - t.front();
    const double tau_lo = std::max(span * 1e-4, 1e-9);
    const double tau_hi = span * 4.0;

    // coarse scan over log tau, then golden-section refinement
    const int scan = 96;
    double best_tau = tau_lo, best_sse = std::numeric_limits<double>::infinity();
    double worst_sse = 0.0;
    double a = 0.0, b = 0.0;
    for (int k = 0; k < scan; ++k) {
        const double tau =
            tau_lo * std::pow(tau_hi / tau_lo, static_cast<double>(k) / (scan - 1));
        const double sse = detail::settle_sse(t, e, tau, a, b);
        worst_sse = std::max(worst_sse, sse);
        if (sse < best_sse) {
            best_sse = sse;
            best_tau = tau;
        }
    }

    SettlingAnalysis out;
    double escale = 0.0;
    for (double v : e) escale = std::max(escale, std::abs(v));
    if (worst_sse - best_sse <= 1e-12 * std::max(worst_sse, 1e-30)) {
        // SSE flat in tau: constant series. Report the smallest scanned tau.
        out.degenerate = true;
        out.tau = tau_lo;
    } else {
        const double phi = 0.6180339887498949;
        double lo = std::log(std::max(best_tau / 3.0, tau_lo));
        double hi = std::log(std::min(best_tau * 3.0, tau_hi));
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = detail::settle_sse(t, e, std::exp(x1), a, b);
        double f2 = detail::settle_sse(t, e, std::exp(x2), a, b);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = detail::settle_sse(t, e, std::exp(x1), a, b);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = detail::settle_sse(t, e, std::exp(x2), a, b);
            }
        }
        out.tau = std::exp(0.5 * (lo + hi));
    }
    detail::settle_sse(t, e, out.tau, out.alpha, out.beta);
    if (std::abs(out.beta) <= 1e-9 * std::max(1.0, escale)) out.degenerate = true;
    out.t_settle = 4.0 * out.tau;

    std::vector<double> steady;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > out.t_settle) steady.push_back(e[i]);
    if (steady.empty())
        throw analysis_error("settling_analysis: trajectory too short, settles after t = " +
                             std::to_string(out.t_settle));
    out.e_q3 = quartile3(steady);
    return out;
}

// --- relative error and controller benchmark ----------------------------------

inline double relative_error(double e_observed, double e_minus, double e_plus) {
    if (!(e_plus > e_minus))
        throw parameter_error("relative_error: e_plus must exceed e_minus");
    return (e_observed - e_minus) / (e_plus - e_minus);
}

struct BenchmarkVerdict {
    FTestResult f;
    TTestResult t; // controller minus sampled distribution
    bool f_reject = false;
    bool t_reject = false;
    bool consistent = false; // neither test rejects at alpha = 0.05
    // CI endpoints as a percentage of the sampled-distribution mean
    double surplus_lo_pct = 0.0;
    double surplus_hi_pct = 0.0;
};

// Two-sample t/F comparison of controller steady-state errors against the
// sampled error distribution.
inline BenchmarkVerdict benchmark_controller(const std::vector<double>& controller_errors,
                                             const ErrorDistribution& dist,
                                             double alpha = 0.05) {
    if (controller_errors.empty())
        throw parameter_error("benchmark_controller: empty controller sample");
    if (!dist.approx_normal)
        throw analysis_error("benchmark_controller: sampled distribution is not "
                             "approximately normal (erf fit RMS > 0.05)");
    BenchmarkVerdict v;
    v.f = two_sample_f_test(controller_errors, dist.samples);
    v.t = two_sample_t_test(controller_errors, dist.samples);
    v.f_reject = v.f.p < alpha;
    v.t_reject = v.t.p < alpha;
    v.consistent = !v.f_reject && !v.t_reject;
    v.surplus_lo_pct = 100.0 * v.t.ci_lo / dist.mean;
    v.surplus_hi_pct = 100.0 * v.t.ci_hi / dist.mean;
    return v;
}

} // namespace swarmcov
