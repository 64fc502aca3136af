#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "raven/error.hpp"

namespace raven {

/// Running count, mean and centered sum of squares of a stream of rewards.
///
/// The update is the recursive mean followed by
///     M_{n+1} = M_n + n/(n+1) * (x - mean_n)^2,
/// implemented in the equivalent product form (x - mean_n)(x - mean_{n+1}).
/// The unbiased variance is M_n / (n - 1), taken only on read.
///
/// The closed-form recursion on the normalized variance,
///     S^2_{n+1} = (1 - 1/n) S^2_n + (n+1) (mean_{n+1} - mean_n)^2,
/// is algebraically equal but divides on every step; carrying M_n avoids
/// the repeated normalization and its round-off.
template <class Scalar = double>
class BasicStreamingStats {
public:
    using value_type = Scalar;

    constexpr BasicStreamingStats() noexcept = default;

    /// Fold one observation in. Throws InvalidObservation for NaN or infinity.
    BasicStreamingStats& update(Scalar x) {
        if (!std::isfinite(x)) {
            throw InvalidObservation("non-finite observation: " + std::to_string(x));
        }
        ++count_;
        const Scalar delta = x - mean_;
        mean_ += delta / static_cast<Scalar>(count_);
        m2_ += delta * (x - mean_);
        if (m2_ < Scalar(0)) {
            m2_ = Scalar(0);
        }
        return *this;
    }

    [[nodiscard]] constexpr std::size_t count() const noexcept { return count_; }
    [[nodiscard]] constexpr Scalar mean() const noexcept { return mean_; }
    [[nodiscard]] constexpr Scalar m2() const noexcept { return m2_; }

    /// Unbiased sample variance; 0 while fewer than two observations exist.
    [[nodiscard]] constexpr Scalar variance() const noexcept {
        return count_ < 2 ? Scalar(0) : m2_ / static_cast<Scalar>(count_ - 1);
    }

    constexpr void reset() noexcept { *this = BasicStreamingStats{}; }

    friend constexpr bool operator==(const BasicStreamingStats&,
                                     const BasicStreamingStats&) = default;

private:
    std::size_t count_ = 0;
    Scalar mean_ = Scalar(0);
    Scalar m2_ = Scalar(0);
};

using StreamingStats = BasicStreamingStats<double>;

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Two-pass batch mean and unbiased variance. Reference for StreamingStats.
/// Empty input gives (0, 0); a single value gives (x, 0).
[[nodiscard]] inline Moments batch_oracle(std::span<const double> xs) {
    if (xs.empty()) {
        return {};
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double n = static_cast<double>(xs.size());
    Moments out;
    out.mean = sum / n;
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) {
            const double d = x - out.mean;
            ss += d * d;
        }
        out.variance = ss / (n - 1.0);
    }
    return out;
}

}  // namespace raven
