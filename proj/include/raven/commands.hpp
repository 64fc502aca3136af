#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "raven/config.hpp"
#include "raven/export.hpp"

namespace raven {

/// Sample mean and variance of n standard-normal draws per (size, trial).
[[nodiscard]] std::vector<MomentsRow> sample_moments(std::span<const std::size_t> sizes,
                                                     std::size_t trials, std::uint64_t seed);

/// Run the configured command, write its files under config.out_dir and print
/// a short report to `log`. config.echo is written first.
void execute(const RunConfig& config, std::ostream& log);

}  // namespace raven
