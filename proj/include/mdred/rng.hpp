#pragma once

#include <cmath>
#include <cstdint>

namespace mdred {

// Portable deterministic generator: xoshiro256++ seeded through splitmix64.
// All sampling (uniform, normal, integer) is implemented on top of the raw
// 64-bit stream so that sequences are bit-identical across platforms and
// standard-library versions.
//
// Stream splitting: trajectory/replicate i of a run seeded with s draws from
// Rng(derive_seed(s, i)); derive_seed(s, 0) == splitmix-scrambled s ^ 0, so
// the documented rule "stream i uses seed xor i" holds before scrambling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
    bool has_spare_;
    double spare_;
};

// Seed for stream `stream` split off a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return base ^ stream;
}

// Seed for a named sub-stage inside one stream (bootstrap draw, projector
// fit, clustering, ...). Keeps stage streams decorrelated.
inline std::uint64_t derive_stage_seed(std::uint64_t stream_seed, std::uint64_t stage) {
    std::uint64_t z = stream_seed + (stage + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace mdred
