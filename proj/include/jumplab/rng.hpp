#pragma once

#include <array>
#include <cstdint>

#include "jumplab/common.hpp"

namespace jumplab {

// Philox4x32-10 block cipher (Salmon et al., SC 2011). Counter-based: the
// n-th output block is a pure function of (key, counter), so replica streams
// are independent of thread scheduling by construction.
struct Philox4x32 {
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One stream per (master seed, replica index). Counter layout:
// words 0-1 hold the draw index, words 2-3 the replica index.
class ReplicaStream {
public:
    ReplicaStream(std::uint64_t seed, std::uint64_t replica)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          replica_lo_(static_cast<std::uint32_t>(replica)),
          replica_hi_(static_cast<std::uint32_t>(replica >> 32)) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on (0, 1]; never returns 0, so logs and open-interval cell
    // times are safe.
    double next_unit() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    // Uniform on (a, b].
    double next_uniform(double a, double b) { return a + next_unit() * (b - a); }

    // Exact Poisson sampling. Knuth's product method below the cutoff;
    // larger means split by additivity to keep the running product away
    // from underflow.
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0) || !std::isfinite(mean))
            throw InvalidInput("poisson mean must be finite and nonnegative");
        if (mean == 0.0) return 0;
        std::uint64_t total = 0;
        while (mean > 30.0) {
            const double half = mean * 0.5;
            total += poisson_small(half);
            mean -= half;
        }
        return total + poisson_small(mean);
    }

private:
    void refill() {
        buf_ = Philox4x32::block({draw_lo_, draw_hi_, replica_lo_, replica_hi_}, key_);
        if (++draw_lo_ == 0) ++draw_hi_;
        pos_ = 0;
    }

    std::uint64_t poisson_small(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = next_unit();
        while (prod > limit) {
            ++k;
            prod *= next_unit();
        }
        return k;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t replica_lo_;
    std::uint32_t replica_hi_;
    std::uint32_t draw_lo_ = 0;
    std::uint32_t draw_hi_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

}  // namespace jumplab
