#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "raven/harness.hpp"
#include "raven/sweep.hpp"

namespace raven {

// CSV writers. Floats use 17 significant digits, every file starts with a
// header row, and policy rows are ordered by policy name, then trial, then
// step. Directories are created as needed; failures throw IoError.

/// "%.17g" rendering used for every float cell.
[[nodiscard]] std::string format_real(double x);

/// summary.csv, curves.csv and trials.csv.
void export_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

/// sweep.csv in grid order.
void export_sweep(const SweepResult& result, const std::filesystem::path& dir);

/// scaling.csv (rows by horizon, then policy name) and scaling_fit.csv.
void export_scaling(const RegretScalingReport& report, const std::filesystem::path& dir);

/// tune.csv in sampling order.
void export_tune(const TuneResult& result, const std::filesystem::path& dir);

struct MomentsRow {
    std::size_t sample_size = 0;
    std::size_t trial = 0;
    double mean = 0.0;
    double variance = 0.0;
};

/// moments.csv.
void export_moments(const std::vector<MomentsRow>& rows, const std::filesystem::path& dir);

/// Write `content` to dir/name.
void write_file(const std::filesystem::path& dir, std::string_view name, std::string_view content);

/// Indices of `names` sorted by name, stable.
[[nodiscard]] std::vector<std::size_t> name_order(const std::vector<std::string>& names);

}  // namespace raven
