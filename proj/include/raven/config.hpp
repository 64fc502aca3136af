#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "raven/environments.hpp"
#include "raven/policies.hpp"
#include "raven/sweep.hpp"

namespace raven {

enum class Command { run, compare, sweep, tune, scaling, moments };

[[nodiscard]] std::string_view to_string(Command c);
[[nodiscard]] std::optional<Command> parse_command(std::string_view name);

struct TuneSettings {
    std::size_t candidates = 50;
    SearchRanges ranges;
    friend bool operator==(const TuneSettings&, const TuneSettings&) = default;
};

/// Horizon sweep for `scaling`; the policy list holds baseline then candidate.
struct ScalingSettings {
    std::vector<std::size_t> horizons = {500, 1000, 2000, 5000, 10000};
    friend bool operator==(const ScalingSettings&, const ScalingSettings&) = default;
};

/// Standard-normal sample moments per (sample size, trial) for `moments`.
struct MomentsSettings {
    std::vector<std::size_t> sizes = {5, 20, 100};
    friend bool operator==(const MomentsSettings&, const MomentsSettings&) = default;
};

/// Fully resolved configuration. Every default is explicit after parsing.
struct RunConfig {
    Command command = Command::compare;
    std::optional<std::string> env;  ///< preset name; absent for sweep and moments
    PresetOptions env_options;       ///< resolved preset parameters, horizon excluded
    std::vector<PolicySpec> policies;
    std::size_t horizon = 0;  ///< 0 when the command has no single horizon
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string out_dir = "results";
    std::size_t checkpoint_stride = 0;
    std::size_t parallel = 1;
    SweepGrid sweep;
    TuneSettings tune;
    ScalingSettings scaling;
    MomentsSettings moments;

    /// Preset built from env and env_options at `horizon`.
    [[nodiscard]] EnvironmentSpec environment() const;
    [[nodiscard]] ExperimentOptions experiment_options() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Validate a config document and fill in defaults. Throws ConfigError naming
/// the offending key for unknown keys, bad types, out-of-range values or a
/// missing seed.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);

/// Normalized document; parse_config(to_json(c)) == c.
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

/// Parse a file; format errors are reported as ConfigError("config", ...).
[[nodiscard]] nlohmann::json load_config_file(const std::string& path);

/// Policy from "kind" or "kind:key=value,...". Values are JSON literals or
/// bare strings, e.g. "raven_ucb:alpha0=5,beta0=0.5,name=tuned".
[[nodiscard]] nlohmann::json parse_policy_flag(std::string_view flag);

[[nodiscard]] PolicySpec policy_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json policy_to_json(const PolicySpec& spec);

}  // namespace raven
