#pragma once

#include <cmath>
#include <cstdint>

namespace gccm {

// Counter-based RNG: Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11),
// paired with a Box-Muller transform for gaussian deviates.
//
// Counter mode is what makes the simulators reproducible: a stream is fully
// identified by (seed, counter), so "dataset for replicate r" is a pure
// function of a 64-bit seed, independent of thread scheduling.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;  // golden-ratio key schedule
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    // One 10-round block: 128-bit counter, 64-bit key -> 128 output bits.
    static void block(const std::uint32_t ctr[4], const std::uint32_t key[2],
                      std::uint32_t out[4]) {
        std::uint32_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(M0) * x0;
            const std::uint64_t p1 = std::uint64_t(M1) * x2;
            const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
            const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += W0; k1 += W1;
        }
        out[0] = x0; out[1] = x1; out[2] = x2; out[3] = x3;
    }
};

// Sequential view over a Philox stream. The 64-bit seed is the key; the block
// counter advances by one per 128 generated bits.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)} {}

    std::uint32_t next_u32() {
        if (idx_ == 4) refill();
        return buf_[idx_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on (0, 1]: 53-bit resolution, never exactly 0 (safe under log).
    double uniform() { return double((next_u64() >> 11) + 1) * 0x1p-53; }

    // Standard normal via Box-Muller; caches the second deviate of each pair.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.28318530717958647692528676655900577 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Recorded in output metadata so archived CSVs identify their generator.
    static constexpr const char* algorithm_id = "philox4x32-10/box-muller";

  private:
    void refill() {
        const std::uint32_t ctr[4] = {std::uint32_t(counter_),
                                      std::uint32_t(counter_ >> 32), 0u, 0u};
        Philox4x32::block(ctr, key_, buf_);
        ++counter_;
        idx_ = 0;
    }

    std::uint32_t key_[2];
    std::uint64_t counter_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int idx_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gccm
