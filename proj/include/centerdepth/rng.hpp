#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace centerdepth::rng {

/// SplitMix64 finalizer; used to derive well-separated seeds and hashed variates.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream tags keep independent consumers of one run seed decorrelated.
enum class Stream : std::uint64_t {
    Scene = 1,
    Render = 2,
    UnaryNoise = 3,
    Planner = 4,
};

/// Seed of sub-stream `index` of `stream`:
///   mix64(mix64(seed ^ mix64(stream)) + index)
/// Frame i uses index i, so frames can be produced in any order or in parallel.
constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream,
                                   std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

/// Counter-based standard normal: a pure function of (key, counter), so any
/// subset of a noise field can be evaluated in any order.
inline double hashed_normal(std::uint64_t key, std::uint64_t counter) noexcept {
    const std::uint64_t a = mix64(key + 2 * counter);
    const std::uint64_t b = mix64(key + 2 * counter + 1);
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Seeded generator with its own distribution code.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so uniform and normal variates are derived here.
class Generator {
public:
    explicit Generator(std::uint64_t seed) : engine_(mix64(seed)) {}
    Generator(std::uint64_t seed, Stream stream, std::uint64_t index)
        : engine_(stream_key(seed, stream, index)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive), rejection sampled.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Standard normal via Box-Muller; the sine variate of each pair is cached
    /// and returned by the next call.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

}  // namespace centerdepth::rng
