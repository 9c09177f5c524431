#pragma once

#include <cmath>
#include <cstdint>

namespace swarmcov {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). A generator is addressed by
// (seed, stream); streams are fully independent, so Monte Carlo tasks keyed
// by draw index produce the same numbers whether they run serially or in
// parallel.
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream) {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        ctr_[0] = 0;
        ctr_[1] = 0;
        ctr_[2] = static_cast<std::uint32_t>(stream);
        ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            block();
            pos_ = 0;
        }
        return out_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void block() {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(M0, c0, hi0, lo0);
            mulhilo(M1, c2, hi1, lo1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += W0;
            k1 += W1;
        }
        out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
        if (++ctr_[0] == 0) ++ctr_[1]; // 2^64 blocks per stream
    }

    std::uint32_t key_[2];
    std::uint32_t ctr_[4];
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace swarmcov
