#pragma once

#include <cmath>
#include <cstdint>

namespace celleval {

// Deterministic counter-style generator (splitmix64 core).
//
// Seeding: Rng(seed) walks the base sequence; Rng(seed, stream) derives an
// independent sequence for the given stream index. Bootstrap-style loops use
// Rng(seed, iteration) so iteration i sees the same randomness no matter how
// iterations are scheduled across threads.
//
// All outputs are pure integer/IEEE-double arithmetic with no calls into
// <random> distributions, so sequences are bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(mix(seed) ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n). Multiply-shift map; the O(n/2^64) bias is
    // irrelevant at the sample sizes used here.
    std::uint64_t next_below(std::uint64_t n) {
        return mul_hi(next_u64(), n);
    }

    // Bernoulli(p).
    bool next_bool(double p) {
        return next_double() < p;
    }

    // Standard normal via Box-Muller on our own uniforms (std::normal_distribution
    // is not bit-stable across standard libraries).
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        double u2 = next_double();
        // Avoid log(0).
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Portable high 64 bits of a 64x64 multiply.
    static std::uint64_t mul_hi(std::uint64_t a, std::uint64_t b) {
#if defined(__SIZEOF_INT128__)
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
#else
        const std::uint64_t a_lo = a & 0xFFFFFFFFULL, a_hi = a >> 32;
        const std::uint64_t b_lo = b & 0xFFFFFFFFULL, b_hi = b >> 32;
        const std::uint64_t mid1 = a_hi * b_lo + ((a_lo * b_lo) >> 32);
        const std::uint64_t mid2 = a_lo * b_hi + (mid1 & 0xFFFFFFFFULL);
        return a_hi * b_hi + (mid1 >> 32) + (mid2 >> 32);
#endif
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace celleval
