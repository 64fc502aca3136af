#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace raven {

/// Active-arm mask; nonzero means selectable.
using ArmMask = std::vector<std::uint8_t>;

enum class RewardFamily { bernoulli, gaussian };

[[nodiscard]] constexpr std::string_view to_string(RewardFamily f) noexcept {
    return f == RewardFamily::bernoulli ? "bernoulli" : "gaussian";
}

}  // namespace raven
