#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace raven {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed and an ordered list of keys.
/// Counter-based: the result depends only on the arguments, never on how many
/// other streams were derived before.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t k : keys) {
        h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Purposes for independent per-trial streams.
enum class StreamPurpose : std::uint64_t {
    env_init = 1,
    env_drift = 2,
    env_reward = 3,
    policy = 4,
    search = 5,
};

constexpr std::uint64_t stream_seed(std::uint64_t trial_seed, StreamPurpose purpose,
                                    std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
    return derive_seed(trial_seed, {static_cast<std::uint64_t>(purpose), a, b});
}

/// SplitMix64 generator. Satisfies std::uniform_random_bit_generator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

// Distribution helpers with fixed algorithms so that every draw is
// reproducible independently of the standard library implementation.

/// Uniform on [0, 1) with 53 bits of resolution.
template <class Engine>
double uniform01(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform(Engine& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// Uniform integer on [0, n). n must be positive.
template <class Engine>
std::uint64_t uniform_index(Engine& g, std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = g();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = g();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal via Box-Muller (first variate only).
template <class Engine>
double standard_normal(Engine& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Log-uniform on [lo, hi]; both bounds positive.
template <class Engine>
double log_uniform(Engine& g, double lo, double hi) {
    return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

}  // namespace raven
