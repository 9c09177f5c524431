// swarmcov: swarm coverage metrics, benchmarks, and demonstrations.
//
// Subcommands chain the library into the two benchmark pipelines
// (realizable extrema -> relative error; sampled error distribution ->
// two-sample tests) plus the quadrature study, discretization pitfall, and
// design sweep demonstrations. Outputs are plain CSV plus a manifest that
// records every effective parameter; re-running a subcommand with
// `--config <manifest>` reproduces the outputs bit-exactly.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmcov/swarmcov.hpp"

using namespace swarmcov;

namespace {

struct GlobalOpts {
    unsigned threads = default_thread_count();
    std::string grid;     // "m1xm2" override for the quadrature grid
    bool quiet = false;
    std::string manifest; // explicit manifest path
};

std::pair<int, int> parse_dims(const std::string& s, const char* what) {
    const auto x = s.find('x');
    if (x == std::string::npos)
        throw parameter_error(std::string(what) + ": expected M1xM2, got '" + s + "'");
    try {
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw parameter_error(std::string(what) + ": expected M1xM2, got '" + s + "'");
    }
}

TargetDensity parse_target(const std::string& spec) {
    if (spec == "ring") return reference_ring();
    if (spec == "ripple") return reference_ripple();
    if (spec.rfind("csv:", 0) == 0) return make_gridded(read_field_csv(spec.substr(4)));
    throw parameter_error("--target: expected ring, ripple, or csv:PATH");
}

QuadratureRule rule_for(const GlobalOpts& g, const Domain& dom, double delta) {
    if (g.grid.empty()) return default_error_rule(dom, delta);
    auto [m1, m2] = parse_dims(g.grid, "--grid");
    return QuadratureRule(QuadKind::rectangle, m1, m2, dom);
}

InitSpec parse_init(const std::string& s, const TargetDensity& rho) {
    if (s.empty() || s == "uniform") return InitSpec::uniform();
    if (s == "sampled") return InitSpec::from_target();
    if (s == "annulus") {
        if (rho.kind() != DensityKind::ring)
            throw parameter_error("--init annulus: only meaningful for the ring target");
        const RingParams& rp = rho.ring_params();
        const Vec2 c = rho.domain().center();
        InitSpec spec = InitSpec::in_region(
            {c.x - rp.r2, c.y - rp.r2, c.x + rp.r2, c.y + rp.r2});
        spec.mode = InitMode::region;
        return spec;
    }
    if (s.rfind("region:", 0) == 0) {
        double x0, y0, x1, y1;
        if (std::sscanf(s.c_str() + 7, "%lf,%lf,%lf,%lf", &x0, &y0, &x1, &y1) != 4)
            throw parameter_error("--init region: expected region:x0,y0,x1,y1");
        return InitSpec::in_region({x0, y0, x1, y1});
    }
    if (s.rfind("file:", 0) == 0)
        return InitSpec::from_positions(read_swarm_csv(s.substr(5)).positions);
    throw parameter_error("--init: expected uniform, sampled, annulus, region:x0,y0,x1,y1, or file:PATH");
}

// Annulus-restricted seeding: uniform proposals inside the bounding box of
// the ring, rejected outside the annulus itself.
std::vector<Vec2> annulus_seed(const TargetDensity& rho, std::size_t n, Philox& rng) {
    const RingParams& rp = rho.ring_params();
    const Vec2 c = rho.domain().center();
    std::vector<Vec2> pos;
    pos.reserve(n);
    while (pos.size() < n) {
        const Vec2 z{rng.uniform(c.x - rp.r2, c.x + rp.r2),
                     rng.uniform(c.y - rp.r2, c.y + rp.r2)};
        const double r2 = (z - c).norm2();
        if (r2 > rp.r1 * rp.r1 && r2 < rp.r2 * rp.r2 && rho.domain().contains(z))
            pos.push_back(z);
    }
    return pos;
}

void write_manifest(const std::string& path, const std::string& sub,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write manifest '" + path + "'");
    out << "[" << sub << "]\n";
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

std::string manifest_path(const GlobalOpts& g, const std::string& out_prefix) {
    if (!g.manifest.empty()) return g.manifest;
    if (!out_prefix.empty()) return out_prefix + "_manifest";
    return {};
}

void maybe_manifest(const GlobalOpts& g, const std::string& out_prefix, const std::string& sub,
                    std::vector<std::pair<std::string, std::string>> kv) {
    const std::string path = manifest_path(g, out_prefix);
    if (path.empty()) return;
    kv.emplace_back("threads", std::to_string(g.threads));
    if (!g.grid.empty()) kv.emplace_back("grid", g.grid);
    write_manifest(path, sub, kv);
}

void info(const GlobalOpts& g, const std::string& line) {
    if (!g.quiet) std::cerr << line << "\n";
}

const char* band_for(double e_rel_pct) {
    if (e_rel_pct < 10.0) return "quite close";
    if (e_rel_pct >= 30.0) return "rather poor";
    return "intermediate";
}

void write_extrema_summary(const std::string& path, double e_minus, double e_plus) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write '" + path + "'");
    out << "e_minus,e_plus\n" << fmt_double(e_minus) << "," << fmt_double(e_plus) << "\n";
}

std::pair<double, double> read_extrema_summary(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.size() < 2) throw parameter_error(path + ": expected header plus one row");
    const auto f = detail::split_csv_line(lines[1]);
    if (f.size() != 2) throw parameter_error(path + ":2: expected 'e_minus,e_plus'");
    return {detail::parse_double(f[0], path, 2), detail::parse_double(f[1], path, 2)};
}

} // namespace

// --- subcommand bodies -------------------------------------------------------

static int cmd_error(const GlobalOpts& g, const std::string& positions_path,
                     const std::string& target, const std::string& partition,
                     const std::string& norm) {
    const TargetDensity rho = parse_target(target);
    const SwarmConfig cfg = read_swarm_csv(positions_path);
    require_in_domain(cfg.positions, rho.domain());
    const BlobNorm bn = norm == "count" ? BlobNorm::count : BlobNorm::boundary;
    const QuadratureRule rule = rule_for(g, rho.domain(), cfg.delta);
    ErrorEvaluator ev(rho, rule, cfg.kernel, bn);
    const double e = ev.value(cfg.positions, cfg.delta);
    const double ehat = ev.one_sided(cfg.positions, cfg.delta);
    std::printf("e,%s\n", fmt_double(e).c_str());
    std::printf("ehat,%s\n", fmt_double(ehat).c_str());
    std::vector<std::pair<std::string, std::string>> kv{
        {"positions", positions_path}, {"target", target}, {"norm", norm}};
    if (!partition.empty()) {
        auto [m1, m2] = parse_dims(partition, "--partition");
        const double mu =
            discretization_error(cfg.positions, rho, Partition(m1, m2, rho.domain()));
        std::printf("mu,%s\n", fmt_double(mu).c_str());
        kv.emplace_back("partition", partition);
    }
    maybe_manifest(g, "", "error", kv);
    return 0;
}

static int cmd_relative_error(const GlobalOpts& g, const std::string& extrema_prefix,
                              const std::string& series_path, const std::string& traj_path,
                              const std::string& target, std::size_t n_robots, double delta,
                              int starts, std::uint64_t seed, const std::string& out_prefix) {
    double e_minus = 0.0, e_plus = 0.0;
    if (!extrema_prefix.empty()) {
        std::tie(e_minus, e_plus) = read_extrema_summary(extrema_prefix + "_extrema.csv");
    } else {
        if (target.empty() || n_robots == 0 || !(delta > 0.0))
            throw parameter_error("relative-error: need --extrema PREFIX or "
                                  "--target/--n/--delta to compute the extrema");
        const TargetDensity rho = parse_target(target);
        OptimizerSettings st;
        st.starts = starts;
        st.seed = seed;
        st.threads = g.threads;
        info(g, "computing extrema (" + std::to_string(starts) + " starts)...");
        const ExtremaHalf lo = minimize_error(rho, n_robots, delta, st);
        const ExtremaHalf hi = maximize_error(rho, n_robots, delta, st);
        e_minus = lo.value;
        e_plus = hi.value;
    }

    std::vector<double> t, e;
    if (!series_path.empty()) {
        std::tie(t, e) = read_series_csv(series_path);
    } else if (!traj_path.empty()) {
        if (target.empty())
            throw parameter_error("relative-error: --trajectory needs --target");
        const TargetDensity rho = parse_target(target);
        const Trajectory traj = read_trajectory_csv(traj_path);
        const QuadratureRule rule = rule_for(g, rho.domain(), traj.delta);
        ErrorEvaluator ev(rho, rule, traj.kernel, BlobNorm::boundary);
        for (std::size_t j = 0; j < traj.times.size(); ++j) {
            t.push_back(traj.times[j]);
            e.push_back(ev.value(traj.snapshots[j], traj.delta));
        }
    } else {
        throw parameter_error("relative-error: need --series or --trajectory input");
    }

    const SettlingAnalysis sa = settling_analysis(t, e);
    const double e_rel = relative_error(sa.e_q3, e_minus, e_plus);
    const double pct = 100.0 * e_rel;
    std::printf("e_minus,%s\n", fmt_double(e_minus).c_str());
    std::printf("e_plus,%s\n", fmt_double(e_plus).c_str());
    std::printf("tau,%s\n", fmt_double(sa.tau).c_str());
    std::printf("t_settle,%s\n", fmt_double(sa.t_settle).c_str());
    std::printf("e_q3,%s\n", fmt_double(sa.e_q3).c_str());
    std::printf("e_rel_percent,%s\n", fmt_double(pct).c_str());
    std::printf("band,%s\n", band_for(pct));
    maybe_manifest(g, out_prefix, "relative-error",
                   {{"extrema", extrema_prefix},
                    {"series", series_path},
                    {"trajectory", traj_path},
                    {"target", target}});
    return 0;
}

static int cmd_extrema(const GlobalOpts& g, const std::string& target, std::size_t n,
                       double delta, const std::string& delta_bounds, int starts,
                       std::uint64_t seed, int max_iters, const std::string& init_str,
                       const std::string& mode, const std::string& out_prefix) {
    const TargetDensity rho = parse_target(target);
    OptimizerSettings st;
    st.starts = starts;
    st.seed = seed;
    st.threads = g.threads;
    if (max_iters > 0) st.max_iterations = max_iters;

    InitSpec init = parse_init(init_str, rho);
    const bool annulus = init_str == "annulus";

    auto run_min = [&](void) -> ExtremaHalf {
        if (!delta_bounds.empty()) {
            double lo, hi;
            if (std::sscanf(delta_bounds.c_str(), "%lf,%lf", &lo, &hi) != 2)
                throw parameter_error("--delta-bounds: expected lo,hi");
            return minimize_error_with_delta(rho, n, st, lo, hi, init);
        }
        if (annulus) {
            // annulus-restricted starts need per-start seeds; run them as
            // "given" single starts
            ExtremaHalf best;
            best.value = std::numeric_limits<double>::infinity();
            std::vector<ExtremaHalf> halves(starts);
            OptimizerSettings one = st;
            one.starts = 1;
            parallel_for(starts, g.threads, [&](std::size_t s) {
                Philox rng(seed, s);
                OptimizerSettings inner = one;
                inner.threads = 1;
                halves[s] = minimize_error(rho, n, delta, inner,
                                           InitSpec::from_positions(annulus_seed(rho, n, rng)),
                                           rule_for(g, rho.domain(), delta));
                halves[s].records[0].start = static_cast<int>(s);
                halves[s].records[0].stream = s;
            });
            for (auto& h : halves) {
                if (h.value < best.value) {
                    best.value = h.value;
                    best.config = h.config;
                    best.delta_star = h.delta_star;
                }
                best.any_converged = best.any_converged || h.any_converged;
                best.records.push_back(h.records[0]);
            }
            return best;
        }
        return minimize_error(rho, n, delta, st, init, rule_for(g, rho.domain(), delta));
    };

    ExtremaHalf lo = run_min();
    info(g, "e_minus = " + fmt_double(lo.value) +
                (delta_bounds.empty() ? "" : "  delta* = " + fmt_double(lo.delta_star)));

    std::optional<ExtremaHalf> hi;
    if (mode == "both" && delta_bounds.empty()) {
        hi = maximize_error(rho, n, delta, st, init, rule_for(g, rho.domain(), delta));
        info(g, "e_plus = " + fmt_double(hi->value));
    }

    if (!out_prefix.empty()) {
        std::ofstream res(out_prefix + "_result.csv");
        if (!res) throw parameter_error("cannot write results");
        res << "phase,start,stream,converged,iterations,value\n";
        for (const auto& r : lo.records)
            res << "min," << r.start << "," << r.stream << "," << (r.converged ? 1 : 0) << ","
                << r.iterations << "," << fmt_double(r.value) << "\n";
        if (hi)
            for (const auto& r : hi->records)
                res << "max," << r.start << "," << r.stream << "," << (r.converged ? 1 : 0)
                    << "," << r.iterations << "," << fmt_double(r.value) << "\n";
        write_swarm_csv(out_prefix + "_argmin.csv", lo.config);
        if (hi) {
            write_swarm_csv(out_prefix + "_argmax.csv", hi->config);
            write_extrema_summary(out_prefix + "_extrema.csv", lo.value, hi->value);
        }
    }
    maybe_manifest(g, out_prefix, "extrema",
                   {{"target", target},
                    {"n", std::to_string(n)},
                    {"delta", fmt_double(delta)},
                    {"delta-bounds", delta_bounds},
                    {"starts", std::to_string(starts)},
                    {"seed", std::to_string(seed)},
                    {"init", init_str.empty() ? "uniform" : init_str},
                    {"mode", mode},
                    {"out", out_prefix}});
    if (!lo.any_converged) {
        info(g, "warning: no start converged; best-so-far reported");
        return 3;
    }
    return 0;
}

static int cmd_pdf(const GlobalOpts& g, const std::string& target, std::size_t n, double delta,
                   std::size_t samples, std::uint64_t seed, const std::string& out_prefix) {
    const TargetDensity rho = parse_target(target);
    const QuadratureRule rule = rule_for(g, rho.domain(), delta);
    info(g, "sampling " + std::to_string(samples) + " configurations...");
    const ErrorDistribution dist =
        estimate_error_distribution(rho, n, delta, Kernel{}, samples, rule, seed, g.threads);

    if (!out_prefix.empty()) {
        std::ofstream s(out_prefix + "_samples.csv");
        s << "e\n";
        for (double e : dist.samples) s << fmt_double(e) << "\n";
        std::ofstream c(out_prefix + "_cdf.csv");
        c << "e,empirical,fitted\n";
        for (std::size_t k = 0; k < dist.samples.size(); ++k) {
            const double emp = static_cast<double>(k + 1) / dist.samples.size();
            const double fit = normal_cdf((dist.samples[k] - dist.mu_hat) / dist.sigma_hat);
            c << fmt_double(dist.samples[k]) << "," << fmt_double(emp) << "," << fmt_double(fit)
              << "\n";
        }
        std::ofstream f(out_prefix + "_fit.csv");
        f << "mu_hat,sigma_hat,rms,sample_mean,sample_sd\n";
        f << fmt_double(dist.mu_hat) << "," << fmt_double(dist.sigma_hat) << ","
          << fmt_double(dist.fit_rms) << "," << fmt_double(dist.mean) << ","
          << fmt_double(dist.sd) << "\n";
    }
    std::printf("mean,%s\n", fmt_double(dist.mean).c_str());
    std::printf("sd,%s\n", fmt_double(dist.sd).c_str());
    std::printf("mu_hat,%s\n", fmt_double(dist.mu_hat).c_str());
    std::printf("sigma_hat,%s\n", fmt_double(dist.sigma_hat).c_str());
    std::printf("fit_rms,%s\n", fmt_double(dist.fit_rms).c_str());
    std::printf("approx_normal,%d\n", dist.approx_normal ? 1 : 0);
    maybe_manifest(g, out_prefix, "pdf",
                   {{"target", target},
                    {"n", std::to_string(n)},
                    {"delta", fmt_double(delta)},
                    {"samples", std::to_string(samples)},
                    {"seed", std::to_string(seed)},
                    {"out", out_prefix}});
    return 0;
}

static int cmd_benchmark(const GlobalOpts& g, const std::string& dist_prefix,
                         const std::string& controller_path, const std::string& traj_path,
                         const std::string& target, const std::string& out_prefix) {
    const std::vector<double> samples = read_value_column(dist_prefix + "_samples.csv");
    const ErrorDistribution dist = make_error_distribution(samples);

    std::vector<double> controller;
    if (!controller_path.empty()) {
        controller = read_value_column(controller_path);
    } else if (!traj_path.empty()) {
        if (target.empty()) throw parameter_error("benchmark: --trajectory needs --target");
        const TargetDensity rho = parse_target(target);
        const Trajectory traj = read_trajectory_csv(traj_path);
        const QuadratureRule rule = rule_for(g, rho.domain(), traj.delta);
        ErrorEvaluator ev(rho, rule, traj.kernel, BlobNorm::count);
        std::vector<double> t, e;
        for (std::size_t j = 0; j < traj.times.size(); ++j) {
            t.push_back(traj.times[j]);
            e.push_back(ev.value(traj.snapshots[j], traj.delta));
        }
        const SettlingAnalysis sa = settling_analysis(t, e);
        for (std::size_t j = 0; j < t.size(); ++j)
            if (t[j] > sa.t_settle) controller.push_back(e[j]);
        info(g, "steady state after t = " + fmt_double(sa.t_settle) + ": " +
                    std::to_string(controller.size()) + " samples");
    } else {
        throw parameter_error("benchmark: need --controller-errors or --trajectory");
    }

    const BenchmarkVerdict v = benchmark_controller(controller, dist);
    std::printf("f_statistic,%s\n", fmt_double(v.f.statistic).c_str());
    std::printf("f_p,%s\n", fmt_double(v.f.p).c_str());
    std::printf("f_reject,%d\n", v.f_reject ? 1 : 0);
    std::printf("t_statistic,%s\n", fmt_double(v.t.statistic).c_str());
    std::printf("t_dof,%s\n", fmt_double(v.t.dof).c_str());
    std::printf("t_p,%s\n", fmt_double(v.t.p).c_str());
    std::printf("t_reject,%d\n", v.t_reject ? 1 : 0);
    std::printf("ci_lo,%s\n", fmt_double(v.t.ci_lo).c_str());
    std::printf("ci_hi,%s\n", fmt_double(v.t.ci_hi).c_str());
    std::printf("consistent,%d\n", v.consistent ? 1 : 0);
    if (v.consistent) {
        info(g, "verdict: controller is consistent with sampling positions from the target");
    } else if (v.t_reject) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "verdict: mean differs; surplus between %.3f%% and %.3f%% of the "
                      "sampled mean",
                      v.surplus_lo_pct, v.surplus_hi_pct);
        info(g, buf);
    } else {
        info(g, "verdict: variances differ");
    }
    if (!out_prefix.empty()) {
        std::ofstream out(out_prefix + "_verdict.csv");
        out << "f_statistic,f_dof1,f_dof2,f_p,t_statistic,t_dof,t_p,ci_lo,ci_hi,consistent\n";
        out << fmt_double(v.f.statistic) << "," << fmt_double(v.f.dof1) << ","
            << fmt_double(v.f.dof2) << "," << fmt_double(v.f.p) << ","
            << fmt_double(v.t.statistic) << "," << fmt_double(v.t.dof) << ","
            << fmt_double(v.t.p) << "," << fmt_double(v.t.ci_lo) << ","
            << fmt_double(v.t.ci_hi) << "," << (v.consistent ? 1 : 0) << "\n";
    }
    maybe_manifest(g, out_prefix, "benchmark",
                   {{"dist", dist_prefix},
                    {"controller-errors", controller_path},
                    {"trajectory", traj_path},
                    {"target", target}});
    return 0;
}

static int cmd_simulate(const GlobalOpts& g, const std::string& target, std::size_t n,
                        double delta, int steps, int snap_every, double sigma_step,
                        const std::string& init_str, std::uint64_t seed,
                        const std::string& out_path) {
    const TargetDensity rho = parse_target(target);
    WalkerSettings ws;
    ws.sigma_step = sigma_step;
    ws.steps_per_snapshot = snap_every;
    ws.snapshots = steps / snap_every;
    ws.seed = seed;
    if (init_str == "uniform" || init_str.empty())
        ws.init = WalkerInit::uniform;
    else if (init_str == "corner")
        ws.init = WalkerInit::corner;
    else if (init_str.rfind("file:", 0) == 0) {
        ws.init = WalkerInit::given;
        ws.given = read_swarm_csv(init_str.substr(5)).positions;
    } else {
        throw parameter_error("--init: expected uniform, corner, or file:PATH");
    }
    const Trajectory traj = run_walkers(rho, n, delta, Kernel{}, ws);
    write_trajectory_csv(out_path, traj);
    info(g, "wrote " + std::to_string(traj.times.size()) + " snapshots to " + out_path);
    maybe_manifest(g, out_path, "simulate",
                   {{"target", target},
                    {"n", std::to_string(n)},
                    {"delta", fmt_double(delta)},
                    {"steps", std::to_string(steps)},
                    {"snap-every", std::to_string(snap_every)},
                    {"sigma-step", fmt_double(sigma_step)},
                    {"init", init_str.empty() ? "uniform" : init_str},
                    {"seed", std::to_string(seed)},
                    {"out", out_path}});
    return 0;
}

static int cmd_quadstudy(const GlobalOpts& g, const std::string& integrand,
                         const std::string& positions_path, const std::string& target,
                         const std::string& m_list, const std::string& out_path) {
    std::vector<int> ms;
    {
        std::stringstream ss(m_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) ms.push_back(std::stoi(tok));
    }
    const std::vector<QuadKind> rules{QuadKind::rectangle, QuadKind::trapezoid,
                                      QuadKind::simpson};
    ConvergenceStudy study;
    Domain dom(48.0, 70.0);
    if (integrand == "smooth") {
        // Gaussian bump with an analytic reference integral.
        auto f = [](const Vec2& z) { return std::exp(-z.norm2()); };
        const double reference =
            pi / 4.0 * std::erf(dom.width) * std::erf(dom.height);
        study = convergence_study(f, dom, rules, ms, reference);
    } else if (integrand == "error") {
        if (positions_path.empty() || target.empty())
            throw parameter_error("quadstudy error integrand: need --positions and --target");
        const TargetDensity rho = parse_target(target);
        dom = rho.domain();
        const SwarmConfig cfg = read_swarm_csv(positions_path);
        require_in_domain(cfg.positions, rho.domain());
        const BlobPointEvaluator blob(cfg, rho.domain());
        auto f = [&](const Vec2& z) { return std::abs(blob(z) - rho.value(z)); };
        info(g, "computing adaptive reference...");
        const double reference = iterated_adaptive_integrate(f, rho.domain(), 1e-8);
        info(g, "reference = " + fmt_double(reference));
        study = convergence_study(f, rho.domain(), rules, ms, reference);
    } else {
        throw parameter_error("--integrand: expected error or smooth");
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw parameter_error("cannot write '" + out_path + "'");
        os = &file;
    }
    *os << "rule,m,E_m\n";
    for (const auto& row : study.rows)
        *os << quad_name(row.rule) << "," << row.m << "," << fmt_double(row.error) << "\n";
    for (const auto& fit : study.fits)
        *os << "# fit," << quad_name(fit.rule) << ",a=" << fmt_double(fit.a)
            << ",b=" << fmt_double(fit.b) << "\n";
    maybe_manifest(g, out_path, "quadstudy",
                   {{"integrand", integrand},
                    {"positions", positions_path},
                    {"target", target},
                    {"m-list", m_list},
                    {"out", out_path}});
    return 0;
}

static int cmd_sweep(const GlobalOpts& g, const std::string& target, const std::string& n_list,
                     const std::string& delta_bounds, int starts, std::uint64_t seed,
                     int max_iters, const std::string& init_str,
                     const std::string& out_prefix) {
    const TargetDensity rho = parse_target(target);
    std::vector<std::size_t> ns;
    {
        std::stringstream ss(n_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) ns.push_back(std::stoul(tok));
    }
    double lo, hi;
    if (std::sscanf(delta_bounds.c_str(), "%lf,%lf", &lo, &hi) != 2)
        throw parameter_error("--delta-bounds: expected lo,hi");
    OptimizerSettings st;
    st.starts = starts;
    st.seed = seed;
    st.threads = g.threads;
    if (max_iters > 0) st.max_iterations = max_iters;
    const SweepResult sweep = design_sweep(rho, ns, st, lo, hi, parse_init(init_str, rho));

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_prefix.empty()) {
        file.open(out_prefix + "_sweep.csv");
        os = &file;
    }
    *os << "n,delta_star,e_min,converged\n";
    for (const auto& r : sweep.rows)
        *os << r.n << "," << fmt_double(r.delta_star) << "," << fmt_double(r.e_min) << ","
            << (r.converged ? 1 : 0) << "\n";
    *os << "# fit,p=" << fmt_double(sweep.exponent) << ",log_c=" << fmt_double(sweep.log_c)
        << ",kde_reference_p=" << fmt_double(sweep.kde_exponent) << "\n";
    if (!out_prefix.empty()) {
        for (std::size_t i = 0; i < sweep.rows.size(); ++i)
            write_swarm_csv(out_prefix + "_argmin_" + std::to_string(sweep.rows[i].n) + ".csv",
                            sweep.argmins[i]);
        info(g, "fitted p = " + fmt_double(sweep.exponent));
    }
    maybe_manifest(g, out_prefix, "sweep",
                   {{"target", target},
                    {"n-list", n_list},
                    {"delta-bounds", delta_bounds},
                    {"starts", std::to_string(starts)},
                    {"seed", std::to_string(seed)},
                    {"init", init_str},
                    {"out", out_prefix}});
    return 0;
}

static int cmd_pitfall(const GlobalOpts& g, const std::string& positions_path,
                       const std::string& target, const std::string& tilings_str,
                       const std::string& out_path) {
    const TargetDensity rho = parse_target(target);
    const SwarmConfig cfg = read_swarm_csv(positions_path);
    require_in_domain(cfg.positions, rho.domain());
    std::vector<std::pair<int, int>> tilings;
    {
        std::stringstream ss(tilings_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) tilings.push_back(parse_dims(tok, "--tilings"));
    }
    if (tilings.size() < 2) throw parameter_error("--tilings: need at least 2 tilings");
    const auto rows = pitfall_report(cfg.positions, rho, tilings);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    *os << "m1,m2,mu\n";
    for (const auto& r : rows)
        *os << r.m1 << "," << r.m2 << "," << fmt_double(r.mu) << "\n";
    maybe_manifest(g, out_path, "pitfall",
                   {{"positions", positions_path},
                    {"target", target},
                    {"tilings", tilings_str},
                    {"out", out_path}});
    return 0;
}

int main(int argc, char** argv) {
    CLI::App app{"swarm coverage error metric benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a manifest/INI file");

    GlobalOpts g;
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
    app.add_option("--grid", g.grid, "quadrature grid override, M1xM2");
    app.add_flag("--quiet", g.quiet, "suppress progress output");
    app.add_option("--manifest", g.manifest, "manifest output path");

    // error
    auto* sub_error = app.add_subcommand("error", "evaluate e (and ehat, mu) for a swarm CSV");
    std::string e_positions, e_target = "ring", e_partition, e_norm = "boundary";
    sub_error->add_option("--positions", e_positions, "SwarmConfig CSV")->required();
    sub_error->add_option("--target", e_target, "ring, ripple, or csv:PATH");
    sub_error->add_option("--partition", e_partition, "also report mu for M1xM2 tiling");
    sub_error->add_option("--norm", e_norm, "blob normalization: boundary or count");

    // relative-error
    auto* sub_rel = app.add_subcommand("relative-error",
                                       "extrema -> settling -> e_Q3 -> relative error");
    std::string r_extrema, r_series, r_traj, r_target, r_out;
    std::size_t r_n = 0;
    double r_delta = 0.0;
    int r_starts = 20;
    std::uint64_t r_seed = 0;
    sub_rel->add_option("--extrema", r_extrema, "prefix of a precomputed extrema run");
    sub_rel->add_option("--series", r_series, "error time series CSV (t,e)");
    sub_rel->add_option("--trajectory", r_traj, "trajectory CSV");
    sub_rel->add_option("--target", r_target, "target density");
    sub_rel->add_option("--n", r_n, "robot count (when computing extrema)");
    sub_rel->add_option("--delta", r_delta, "blob radius (when computing extrema)");
    sub_rel->add_option("--starts", r_starts, "multistart count");
    sub_rel->add_option("--seed", r_seed, "seed");
    sub_rel->add_option("--out", r_out, "output prefix (manifest)");

    // extrema
    auto* sub_ext = app.add_subcommand("extrema", "multistart bounds e- / e+");
    std::string x_target = "ring", x_bounds, x_init = "uniform", x_mode = "both", x_out;
    std::size_t x_n = 200;
    double x_delta = 2.0;
    int x_starts = 50, x_maxit = 0;
    std::uint64_t x_seed = 0;
    sub_ext->add_option("--target", x_target, "target density");
    sub_ext->add_option("--n", x_n, "robot count");
    sub_ext->add_option("--delta", x_delta, "blob radius (fixed-delta mode)");
    sub_ext->add_option("--delta-bounds", x_bounds, "lo,hi: optimize delta jointly");
    sub_ext->add_option("--starts", x_starts, "multistart count");
    sub_ext->add_option("--seed", x_seed, "seed");
    sub_ext->add_option("--max-iters", x_maxit, "iteration cap per start");
    sub_ext->add_option("--init", x_init, "uniform | sampled | annulus | region:x0,y0,x1,y1 | file:PATH");
    sub_ext->add_option("--mode", x_mode, "both | min");
    sub_ext->add_option("--out", x_out, "output prefix");

    // pdf
    auto* sub_pdf = app.add_subcommand("pdf", "Monte Carlo error distribution + erf fit");
    std::string p_target = "ring", p_out;
    std::size_t p_n = 200, p_samples = 1000;
    double p_delta = 2.0;
    std::uint64_t p_seed = 0;
    sub_pdf->add_option("--target", p_target, "target density");
    sub_pdf->add_option("--n", p_n, "robot count");
    sub_pdf->add_option("--delta", p_delta, "blob radius");
    sub_pdf->add_option("--samples", p_samples, "Monte Carlo sample count");
    sub_pdf->add_option("--seed", p_seed, "seed");
    sub_pdf->add_option("--out", p_out, "output prefix");

    // benchmark
    auto* sub_bench = app.add_subcommand("benchmark", "t/F tests against a pdf run");
    std::string b_dist, b_controller, b_traj, b_target, b_out;
    sub_bench->add_option("--dist", b_dist, "prefix of a pdf run")->required();
    sub_bench->add_option("--controller-errors", b_controller, "CSV of steady-state e values");
    sub_bench->add_option("--trajectory", b_traj, "trajectory CSV (settling analysis first)");
    sub_bench->add_option("--target", b_target, "target density (for --trajectory)");
    sub_bench->add_option("--out", b_out, "output prefix");

    // simulate
    auto* sub_sim = app.add_subcommand("simulate", "Metropolis walker reference controller");
    std::string s_target = "ring", s_init = "uniform", s_out;
    std::size_t s_n = 200;
    double s_delta = 2.0, s_sigma = 2.0;
    int s_steps = 20000, s_snap = 100;
    std::uint64_t s_seed = 0;
    sub_sim->add_option("--target", s_target, "target density");
    sub_sim->add_option("--n", s_n, "robot count");
    sub_sim->add_option("--delta", s_delta, "blob radius");
    sub_sim->add_option("--steps", s_steps, "total Metropolis steps per robot");
    sub_sim->add_option("--snap-every", s_snap, "steps between snapshots");
    sub_sim->add_option("--sigma-step", s_sigma, "proposal standard deviation, inches");
    sub_sim->add_option("--init", s_init, "uniform | corner | file:PATH");
    sub_sim->add_option("--seed", s_seed, "seed");
    sub_sim->add_option("--out", s_out, "trajectory CSV path")->required();

    // quadstudy
    auto* sub_quad = app.add_subcommand("quadstudy", "quadrature convergence study");
    std::string q_integrand = "error", q_positions, q_target = "ring", q_out;
    std::string q_mlist = "129,193,257,385,513,769,1025";
    sub_quad->add_option("--integrand", q_integrand, "error | smooth");
    sub_quad->add_option("--positions", q_positions, "SwarmConfig CSV (error integrand)");
    sub_quad->add_option("--target", q_target, "target density (error integrand)");
    sub_quad->add_option("--m-list", q_mlist, "comma-separated nodes per axis");
    sub_quad->add_option("--out", q_out, "output CSV path");

    // sweep
    auto* sub_sweep = app.add_subcommand("sweep", "optimal delta*(N) design sweep");
    std::string w_target = "ring", w_nlist = "22,44,79,128,200,256", w_bounds = "1,8", w_out;
    std::string w_init = "sampled";
    int w_starts = 4, w_maxit = 0;
    std::uint64_t w_seed = 0;
    sub_sweep->add_option("--target", w_target, "target density");
    sub_sweep->add_option("--n-list", w_nlist, "comma-separated swarm sizes");
    sub_sweep->add_option("--delta-bounds", w_bounds, "lo,hi for delta");
    sub_sweep->add_option("--starts", w_starts, "random starts per size");
    sub_sweep->add_option("--seed", w_seed, "seed");
    sub_sweep->add_option("--max-iters", w_maxit, "iteration cap per start");
    sub_sweep->add_option("--init", w_init, "uniform | sampled | region:... | file:PATH");
    sub_sweep->add_option("--out", w_out, "output prefix");

    // pitfall
    auto* sub_pit = app.add_subcommand("pitfall", "mu across tilings");
    std::string t_positions, t_target = "ring", t_tilings = "1x1,4x4,1024x1024", t_out;
    sub_pit->add_option("--positions", t_positions, "SwarmConfig CSV")->required();
    sub_pit->add_option("--target", t_target, "target density");
    sub_pit->add_option("--tilings", t_tilings, "comma-separated M1xM2 list");
    sub_pit->add_option("--out", t_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sub_error->parsed())
            return cmd_error(g, e_positions, e_target, e_partition, e_norm);
        if (sub_rel->parsed())
            return cmd_relative_error(g, r_extrema, r_series, r_traj, r_target, r_n, r_delta,
                                      r_starts, r_seed, r_out);
        if (sub_ext->parsed())
            return cmd_extrema(g, x_target, x_n, x_delta, x_bounds, x_starts, x_seed, x_maxit,
                               x_init, x_mode, x_out);
        if (sub_pdf->parsed()) return cmd_pdf(g, p_target, p_n, p_delta, p_samples, p_seed, p_out);
        if (sub_bench->parsed())
            return cmd_benchmark(g, b_dist, b_controller, b_traj, b_target, b_out);
        if (sub_sim->parsed())
            return cmd_simulate(g, s_target, s_n, s_delta, s_steps, s_snap, s_sigma, s_init,
                                s_seed, s_out);
        if (sub_quad->parsed())
            return cmd_quadstudy(g, q_integrand, q_positions, q_target, q_mlist, q_out);
        if (sub_sweep->parsed())
            return cmd_sweep(g, w_target, w_nlist, w_bounds, w_starts, w_seed, w_maxit, w_init,
                             w_out);
        if (sub_pit->parsed())
            return cmd_pitfall(g, t_positions, t_target, t_tilings, t_out);
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const analysis_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
