#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace coxnet {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Chosen over
// std::mt19937 because substreams keyed by (seed, stream) make replicate
// draws independent of execution order, which the reproducibility contract
// needs for parallel Monte Carlo.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() {
        if (avail_ == 0) {
            generate();
            avail_ = 4;
        }
        return block_[4 - avail_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // uniform on the open interval (0,1); never returns 0 or 1, so -log(u)
    // is always finite
    double uniform01() {
        std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // unbiased integer in [0, n)
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(prod >> 32);
        lo = static_cast<std::uint32_t>(prod);
    }

    void generate() {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
        std::uint32_t c2 = stream_lo_;
        std::uint32_t c3 = stream_hi_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        block_[0] = c0;
        block_[1] = c1;
        block_[2] = c2;
        block_[3] = c3;
        ++counter_;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4] = {};
    int avail_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream ids for the simulation channels. A replicate index goes in the
// high half so channels never collide across replicates.
inline std::uint64_t substream(std::uint64_t replicate, std::uint32_t channel) {
    return (replicate << 8) | channel;
}

}
