#pragma once

#include <cstdint>
#include <vector>

#include "swarmcov/density.hpp"
#include "swarmcov/error_metric.hpp"
#include "swarmcov/rng.hpp"

namespace swarmcov {

enum class WalkerInit { uniform, corner, given };

struct WalkerSettings {
    double sigma_step = 2.0; // proposal scale, inches
    int steps_per_snapshot = 1;
    int snapshots = 2;
    std::uint64_t seed = 0;
    WalkerInit init = WalkerInit::uniform;
    std::vector<Vec2> given;

    void validate() const {
        if (!(sigma_step > 0.0)) throw parameter_error("walkers: sigma_step must be positive");
        if (snapshots < 2) throw parameter_error("walkers: need at least 2 snapshots");
        if (steps_per_snapshot < 1)
            throw parameter_error("walkers: steps_per_snapshot must be >= 1");
    }
};

// Reference stochastic controller: independent Metropolis random walkers with
// target rho. Proposals are isotropic Gaussian steps; proposals landing
// outside the domain are rejected (the walker stays put), which keeps rho
// the stationary density of each walker. Every robot owns the stream
// (seed, robot index), so a parallel rollout reproduces the serial one.
inline Trajectory run_walkers(const TargetDensity& rho, std::size_t n, double delta,
                              Kernel kernel, const WalkerSettings& s) {
    s.validate();
    if (n < 1) throw parameter_error("walkers: need at least one robot");
    const Domain& dom = rho.domain();

    Trajectory traj;
    traj.delta = delta;
    traj.kernel = kernel;
    traj.times.reserve(s.snapshots);
    traj.snapshots.assign(s.snapshots, std::vector<Vec2>(n));

    for (std::size_t i = 0; i < n; ++i) {
        Philox rng(s.seed, i);
        Vec2 x;
        switch (s.init) {
        case WalkerInit::uniform:
            x = {rng.uniform(0.0, dom.width), rng.uniform(0.0, dom.height)};
            break;
        case WalkerInit::corner:
            // cluster in a 2in square at the origin corner
            x = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
            break;
        case WalkerInit::given:
            if (s.given.size() != n)
                throw parameter_error("walkers: given init size mismatch");
            x = dom.clamp(s.given[i]);
            break;
        }
        double fx = rho.value(x);
        for (int snap = 0; snap < s.snapshots; ++snap) {
            for (int step = 0; step < s.steps_per_snapshot; ++step) {
                const Vec2 prop{x.x + s.sigma_step * rng.normal(),
                                x.y + s.sigma_step * rng.normal()};
                const double u = rng.uniform();
                if (!dom.contains(prop)) continue;
                const double fp = rho.value(prop);
                if (u < fp / fx) {
                    x = prop;
                    fx = fp;
                }
            }
            traj.snapshots[snap][i] = x;
        }
    }
    for (int snap = 0; snap < s.snapshots; ++snap)
        traj.times.push_back(static_cast<double>((snap + 1) * s.steps_per_snapshot));
    return traj;
}

} // namespace swarmcov
