#pragma once
// Pinned PRNG for reproducible simulation. SplitMix64 (Steele, Lea &
// Flood's splittable generator as published in the JDK reference
// implementation): state advances by the golden-gamma increment and each
// output is an avalanche mix of the counter, so per-replica streams derived
// by hashing (seed, replica index) are cheap and platform-independent.
// std:: engines/distributions are avoided on purpose: uniform_real_distribution
// is implementation-defined, which would break bit-exact replay.

#include <cstdint>

namespace flpricing {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// Finalizer of SplitMix64; a 64-bit avalanche hash in its own right.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

// Stream for one replica: both inputs are avalanche-mixed before combining so
// neighbouring replica indices land in unrelated regions of the state space
// (plain offsets would produce shifted, overlapping SplitMix64 sequences).
inline SplitMix64 replica_stream(std::uint64_t seed, std::uint64_t replica_index) {
    return SplitMix64(mix64(mix64(seed) ^ mix64(replica_index + kGoldenGamma)));
}

}  // namespace flpricing
