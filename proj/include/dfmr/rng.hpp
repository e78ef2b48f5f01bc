#pragma once

#include <cstdint>

namespace dfmr {

// splitmix64 finalizer. Counter-based draws (hash of seed + index) keep
// corpus-parallel runs order-independent: slot i always gets the same value
// no matter which thread computes it.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + counter * 0x9E3779B97F4A7C15ULL);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Sequential stream flavour for test generators.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return mix64(state_++); }
    double next_unit() { return unit_double(next()); }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

} // namespace dfmr
