#pragma once

// Deterministic random streams.
//
// Every random quantity in the library comes from a Stream, and every Stream
// is seeded from a master seed plus a stream identifier through mix64. The
// engine is std::mt19937_64, whose output sequence is fixed by the standard;
// the conversions to doubles and bounded integers are implemented here
// rather than through <random> distributions, which are not portable across
// standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace smerisk {

// SplitMix64 finalizer applied to seed + golden-ratio * (stream + 1).
constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    Stream(std::uint64_t master_seed, std::uint64_t stream_id)
        : engine_(mix64(master_seed, stream_id)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [low, high); returns low when low == high.
    double uniform(double low, double high) {
        const double v = low + (high - low) * uniform01();
        return v < high ? v : (low < high ? std::nextafter(high, low) : low);
    }

    // Uniform integer on [0, n), n >= 1. Rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace smerisk
