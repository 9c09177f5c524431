#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "swarmcov/extrema.hpp"

using namespace swarmcov;

namespace {

TargetDensity small_uniform() { return make_ring(40.0, 40.0, 5.0, 8.0, 1.0, 1.0); }

} // namespace

TEST_CASE("analytic gradient matches central differences on random configs") {
    const TargetDensity ring = reference_ring();
    Philox rng(61, 0);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 20; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 10);
        std::vector<Vec2> pos(n);
        for (auto& p : pos) p = {rng.uniform(0.0, 48.0), rng.uniform(0.0, 70.0)};
        const double delta = rng.uniform(1.0, 4.0);
        const QuadratureRule rule = default_error_rule(ring.domain(), delta);
        ErrorEvaluator ev(ring, rule, Kernel{}, BlobNorm::boundary);

        // skip configurations with a near-degenerate node, where the
        // almost-everywhere gradient is untrusted
        std::vector<double> raw;
        ev.raw_field(pos, delta, raw);
        const double invD =
            1.0 / blob_denominator(pos, delta, Kernel{}, ring.domain(), BlobNorm::boundary);
        const auto& tg = ev.target_grid();
        double min_gap = 1e300;
        for (std::size_t k = 0; k < raw.size(); ++k)
            min_gap = std::min(min_gap, std::abs(raw[k] * invD - tg[k]));
        if (min_gap < 1e-9) continue;
        ++checked;

        std::vector<Vec2> grad;
        ev.value_and_grad(pos, delta, grad);
        const double h = 1e-5;
        for (std::size_t i = 0; i < std::min<std::size_t>(n, 3); ++i) {
            for (int axis = 0; axis < 2; ++axis) {
                auto hi = pos, lo = pos;
                (axis == 0 ? hi[i].x : hi[i].y) += h;
                (axis == 0 ? lo[i].x : lo[i].y) -= h;
                const double fd = (ev.value(hi, delta) - ev.value(lo, delta)) / (2.0 * h);
                const double an = axis == 0 ? grad[i].x : grad[i].y;
                CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-6));
            }
        }
    }
    CHECK(checked == 20);
}

TEST_CASE("single robot recovers an exactly representable target") {
    // target = the robot's own blob at the domain center
    const Domain dom(48.0, 70.0);
    const double delta = 3.0;
    const SwarmConfig truth({dom.center()}, delta);
    GridSpec g(241, 351, GridNodes::cell_corners, dom);
    std::vector<double> v(g.size());
    for (int j = 0; j < g.m2; ++j)
        for (int i = 0; i < g.m1; ++i)
            v[g.index(i, j)] = std::max(blob_at(truth, dom, g.node(i, j)), 1e-30);
    const TargetDensity target = make_gridded(ScalarField(g, std::move(v)));

    OptimizerSettings st;
    st.starts = 1;
    st.max_iterations = 500;
    const ExtremaHalf lo = minimize_error(
        target, 1, delta, st, InitSpec::from_positions({{22.0, 37.0}}));
    CHECK(lo.value < 5e-3);
    CHECK(std::abs(lo.config.positions[0].x - 24.0) < 0.1);
    CHECK(std::abs(lo.config.positions[0].y - 35.0) < 0.1);
}

TEST_CASE("single robot on a uniform target maximizes at a corner") {
    const TargetDensity flat = small_uniform();
    OptimizerSettings st;
    st.starts = 6;
    st.seed = 2;
    st.max_iterations = 800;
    const ExtremaHalf hi = maximize_error(flat, 1, 2.0, st);
    const Vec2 p = hi.config.positions[0];
    const double dx = std::min(p.x, 40.0 - p.x);
    const double dy = std::min(p.y, 40.0 - p.y);
    CHECK(dx < 1e-6);
    CHECK(dy < 1e-6);
}

TEST_CASE("stationary start terminates immediately") {
    const TargetDensity ring = reference_ring();
    OptimizerSettings st;
    st.starts = 1;
    st.max_iterations = 400;
    // converge once, then restart from the converged point
    const ExtremaHalf first = maximize_error(
        ring, 8, 2.0, st, InitSpec::in_region({0.0, 0.0, 1.0, 1.0}));
    REQUIRE(first.any_converged);
    const ExtremaHalf again =
        maximize_error(ring, 8, 2.0, st, InitSpec::from_positions(first.config.positions));
    CHECK(again.records[0].iterations <= 2);
    CHECK(std::abs(again.value - first.value) < 1e-6);
}

TEST_CASE("fixed seed reproduces the result bitwise") {
    const TargetDensity ring = reference_ring();
    OptimizerSettings st;
    st.starts = 4;
    st.seed = 77;
    st.max_iterations = 120;
    st.threads = 2;
    const ExtremaHalf a = minimize_error(ring, 10, 2.5, st);
    const ExtremaHalf b = minimize_error(ring, 10, 2.5, st);
    CHECK(a.value == b.value);
    REQUIRE(a.config.positions.size() == b.config.positions.size());
    for (std::size_t i = 0; i < a.config.positions.size(); ++i)
        CHECK(a.config.positions[i] == b.config.positions[i]);
    for (std::size_t s = 0; s < a.records.size(); ++s) {
        CHECK(a.records[s].value == b.records[s].value);
        CHECK(a.records[s].iterations == b.records[s].iterations);
    }
}

TEST_CASE("iterates stay inside the box and descent is monotone") {
    const TargetDensity ring = reference_ring();
    const QuadratureRule rule = default_error_rule(ring.domain(), 2.0);
    ErrorEvaluator ev(ring, rule, Kernel{}, BlobNorm::boundary);
    // run a short optimization manually and track the objective
    Philox rng(62, 0);
    std::vector<Vec2> pos(12);
    for (auto& p : pos) p = {rng.uniform(0.0, 48.0), rng.uniform(0.0, 70.0)};
    OptimizerSettings st;
    st.max_iterations = 60;
    std::vector<Vec2> grad;
    double prev = ev.value_and_grad(pos, 2.0, grad);
    for (int it = 0; it < 25; ++it) {
        detail::ProjectedGradient pg(ev, st, +1.0, false, 0, 0);
        OptimizerSettings one = st;
        one.max_iterations = 1;
        detail::ProjectedGradient pg1(ev, one, +1.0, false, 0, 0);
        double dd = 2.0;
        pg1.run(pos, dd);
        for (const Vec2& p : pos) {
            CHECK(p.x >= 0.0);
            CHECK(p.x <= 48.0);
            CHECK(p.y >= 0.0);
            CHECK(p.y <= 70.0);
        }
        const double cur = ev.value(pos, 2.0);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("argmin value is stable under grid refinement") {
    const TargetDensity ring = reference_ring();
    OptimizerSettings st;
    st.starts = 2;
    st.seed = 9;
    st.max_iterations = 1500;
    const ExtremaHalf lo = minimize_error(ring, 15, 2.5, st);
    const double fine = error(SwarmConfig(lo.config.positions, 2.5), ring,
                              default_error_rule(ring.domain(), 2.5, 0.25));
    CHECK(std::abs(fine - lo.value) < 5e-3);
}

TEST_CASE("joint delta optimization hits the upper bound on a uniform target") {
    // a single fat blob always fits a uniform target better, so delta* -> hi
    const TargetDensity flat = small_uniform();

    // 1-D sweep oracle over delta at the domain center
    const QuadratureRule rule = default_error_rule(flat.domain(), 1.0);
    ErrorEvaluator ev(flat, rule, Kernel{}, BlobNorm::boundary);
    std::vector<Vec2> center{flat.domain().center()};
    double prev = 1e300;
    for (double d : {1.0, 2.0, 4.0, 8.0, 12.0}) {
        const double e = ev.value(center, d);
        CHECK(e < prev);
        prev = e;
    }

    OptimizerSettings st;
    st.starts = 3;
    st.seed = 4;
    st.max_iterations = 600;
    const ExtremaHalf lo = minimize_error_with_delta(flat, 1, st, 1.0, 12.0);
    CHECK(lo.delta_star == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("design sweep input validation") {
    const TargetDensity ring = reference_ring();
    OptimizerSettings st;
    CHECK_THROWS_AS(design_sweep(ring, {10, 20, 30}, st, 0.5, 8.0), parameter_error);
    CHECK_THROWS_AS(minimize_error_with_delta(ring, 5, st, 2.0, 1.0), parameter_error);
    CHECK_THROWS_AS(minimize_error(ring, 0, 2.0, st), parameter_error);
}
