#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "raven/types.hpp"

namespace raven {

/// Reward law of one arm at one step. For Bernoulli arms `mu` is the success
/// probability and `sigma2` is unused (the variance is mu(1 - mu)).
struct ArmDistribution {
    RewardFamily family = RewardFamily::gaussian;
    double mu = 0.0;
    double sigma2 = 0.0;

    [[nodiscard]] double variance() const noexcept {
        return family == RewardFamily::bernoulli ? mu * (1.0 - mu) : sigma2;
    }

    friend bool operator==(const ArmDistribution&, const ArmDistribution&) = default;
};

/// Uniform ranges used for initial draws and localized resets.
struct ParamRanges {
    double mu_min = 0.0;
    double mu_max = 1.0;
    double sigma2_min = 0.0;
    double sigma2_max = 0.0;

    void validate(RewardFamily family) const;
    friend bool operator==(const ParamRanges&, const ParamRanges&) = default;
};

// Scenario schedules. Steps are 1-based; `arms` in the spec is the t = 0 state.

struct Stationary {};

/// mu_k(t) = mu_k(0) + slope_k * t (Bernoulli means clamped to [0, 1]).
struct IncrementalDrift {
    std::vector<double> slopes;
};

/// sigma2_k(t) = sigma2_k(0) + rate_k * t.
struct VarianceDrift {
    std::vector<double> rates;
};

/// Old law before t0, new law from t1; in between each arm independently
/// plays the new law with probability rho(t) = (t - t0) / (t1 - t0).
struct GradualDrift {
    std::size_t t0 = 0;
    std::size_t t1 = 0;
    std::vector<ArmDistribution> target;
};

/// At every multiple of `interval`, `reset_count` distinct arms chosen
/// uniformly get fresh mu ~ U(mu range), sigma2 ~ U(sigma2 range).
struct LocalizedJump {
    std::size_t interval = 0;
    ParamRanges ranges;
    std::size_t reset_count = 0;
};

struct PeriodicPhase {
    std::size_t length = 0;
    std::vector<ArmDistribution> arms;
};

/// Piecewise-constant phases repeating with period = sum of phase lengths.
/// Step t plays the phase containing (t - 1) mod period.
struct Periodic {
    std::vector<PeriodicPhase> phases;
    [[nodiscard]] std::size_t period() const noexcept;
};

/// `blip` replaces the normal laws on [start, start + duration).
struct Blips {
    std::size_t start = 0;
    std::size_t duration = 0;
    std::vector<ArmDistribution> blip;
};

/// `added_arm` is inactive before t_add; `removed_arm` is inactive from t_remove.
struct AddRemove {
    std::size_t t_add = 0;
    std::size_t t_remove = 0;
    std::size_t added_arm = 0;
    std::size_t removed_arm = 0;
};

using ScenarioParams = std::variant<Stationary, IncrementalDrift, VarianceDrift, GradualDrift,
                                    LocalizedJump, Periodic, Blips, AddRemove>;

enum class Scenario {
    stationary,
    incremental_drift,
    variance_drift,
    gradual_drift,
    localized_jump,
    periodic,
    blips,
    add_remove_arm,
};

[[nodiscard]] std::string_view to_string(Scenario s);

struct EnvironmentSpec {
    std::string name;
    std::size_t horizon = 0;
    std::vector<ArmDistribution> arms;
    /// When set, every trial redraws the t = 0 laws from these ranges.
    std::optional<ParamRanges> initial_draw;
    ScenarioParams scenario;

    [[nodiscard]] Scenario kind() const noexcept { return static_cast<Scenario>(scenario.index()); }
    [[nodiscard]] std::size_t arm_slots() const noexcept { return arms.size(); }
    [[nodiscard]] RewardFamily family() const;

    /// Throws ConfigError on inconsistent sizes, ranges or change points.
    void validate() const;
};

/// Evolving hidden state of one trial.
struct EnvironmentState {
    std::size_t t = 0;
    std::vector<ArmDistribution> base;  ///< t = 0 laws after the initial draw
    std::vector<ArmDistribution> arms;  ///< laws in force at step t
    std::vector<double> means;          ///< arms[k].mu, contiguous for oracle views
    ArmMask active;
};

/// State at step 1 for the trial identified by `trial_seed`.
[[nodiscard]] EnvironmentState initial_state(const EnvironmentSpec& spec, std::uint64_t trial_seed);

/// Move `env` forward to step `t` (must be env.t + 1 and <= horizon).
/// Randomness is keyed by (trial_seed, t), so the schedule never depends on
/// which policy is playing.
void advance(EnvironmentState& env, const EnvironmentSpec& spec, std::size_t t,
             std::uint64_t trial_seed);

/// Reward of `arm` at the current step. Keyed by (trial_seed, t, arm): every
/// policy that pulls the same arm at the same step in the same trial sees the
/// same value. Throws InvalidArm for inactive arms.
[[nodiscard]] double sample_reward(const EnvironmentState& env, std::size_t arm,
                                   std::uint64_t trial_seed);

struct OracleBest {
    std::size_t arm = 0;
    double mean = 0.0;
};

/// Best active arm by true mean, lowest index on ties.
[[nodiscard]] OracleBest oracle_best(const EnvironmentState& env);

/// Upper bound b on rewards used by UCB-V: 1 for Bernoulli, otherwise
/// mu_max + 3 sigma_max over every law the schedule can reach.
[[nodiscard]] double reward_range_bound(const EnvironmentSpec& spec);

/// True laws and masks for steps 1..horizon of one trial.
struct Trajectory {
    std::vector<std::vector<ArmDistribution>> arms;  ///< [t - 1][k]
    std::vector<ArmMask> active;                     ///< [t - 1][k]
};

[[nodiscard]] Trajectory record_trajectory(const EnvironmentSpec& spec, std::uint64_t trial_seed);

// ---------------------------------------------------------------------------
// Builders and named presets.

/// Stationary Bernoulli bandit with theta_k ~ U(mu_min, mu_max) drawn from `seed`.
[[nodiscard]] EnvironmentSpec make_bernoulli_experiment(std::size_t k, double mu_min,
                                                        double mu_max, std::uint64_t seed,
                                                        std::size_t horizon = 5000);

struct LogisticsParams {
    std::size_t k = 100;
    double mu_min = 0.3;
    double mu_max = 0.8;
    double sigma2_min = 0.01;
    double sigma2_max = 0.09;
    std::size_t reset_interval = 5000;
    std::size_t horizon = 50000;

    static LogisticsParams table2() { return {}; }
    static LogisticsParams desk() { return {20, 0.3, 0.8, 0.01, 0.09, 2000, 10000}; }
};

/// Gaussian localized-jump environment: initial laws drawn per trial from the
/// ranges, floor(K/3) arms reset every `reset_interval` steps.
[[nodiscard]] EnvironmentSpec make_logistics_env(const LogisticsParams& params);

/// Overrides accepted by the named presets. Unset fields keep preset defaults.
struct PresetOptions {
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> k;
    std::optional<double> mu_min;
    std::optional<double> mu_max;
    std::optional<double> sigma2_min;
    std::optional<double> sigma2_max;
    std::optional<double> sigma2;         ///< synthetic presets: base variance
    std::optional<std::size_t> reset_interval;
    std::optional<double> drift_rate;     ///< incremental: |delta| per step
    std::optional<double> variance_rate;  ///< variance-drift: g_k(t) = rate * t
    std::optional<double> blip_delta;     ///< blips: shift of the best arm's mean
    std::optional<double> blip_fraction;  ///< blips: duration as a fraction of T
    std::optional<std::size_t> period;    ///< periodic: full period P

    friend bool operator==(const PresetOptions&, const PresetOptions&) = default;
};

[[nodiscard]] std::span<const std::string_view> preset_names();

/// `options` with every parameter of the named preset filled in (horizon
/// included). Throws ConfigError for unknown presets or unused overrides.
[[nodiscard]] PresetOptions resolve_preset_options(std::string_view name,
                                                   const PresetOptions& options);

/// Build a named preset. `seed` feeds presets whose laws are drawn once at
/// construction (bernoulli-s4.1). Throws ConfigError for unknown names or
/// overrides the preset does not use.
[[nodiscard]] EnvironmentSpec make_preset(std::string_view name, const PresetOptions& options,
                                          std::uint64_t seed);

/// Default horizon and trial count a preset is run with.
struct PresetDefaults {
    std::size_t horizon = 0;
    std::size_t trials = 0;
};
[[nodiscard]] PresetDefaults preset_defaults(std::string_view name);

}  // namespace raven
