#pragma once

#include <cstdint>

namespace frogtoad {

// Portable deterministic RNG (splitmix64). Used everywhere a seeded stream
// is needed so that results are bit-identical across platforms; the standard
// <random> distributions are implementation-defined and would break that.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift; bias is < 2^-64 per draw, irrelevant at our scales.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

// Stateless mix of a seed with stream identifiers; used to derive
// independent per-worker / per-episode streams from one top-level seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 rng(seed ^ (a * 0xD1342543DE82EF95ULL) ^ (b * 0x2545F4914F6CDD1DULL));
    rng.next_u64();
    return rng.next_u64();
}

}  // namespace frogtoad
