#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "raven/environments.hpp"
#include "raven/policies.hpp"

namespace raven {

/// Full per-step record of one policy in one trial.
struct TrialResult {
    std::vector<std::size_t> chosen_arms;
    std::vector<double> rewards;
    std::vector<double> inst_regret;  ///< max_k mu_k(t) - mu_{k_t}(t), true means
    double cum_reward = 0.0;
    double cum_regret = 0.0;
    std::size_t suboptimal_pulls = 0;  ///< steps whose arm differs from the oracle arm
    std::uint64_t seed = 0;
};

/// Thrown when a trial fails; carries the step it failed at.
class TrialFailure : public Error {
public:
    TrialFailure(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Trial seed for trial `index` of an experiment.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index);

/// select -> sample_reward -> observe -> advance for t = 1..horizon.
/// Deterministic in (policy, env, horizon, seed). Requires
/// initial active arms <= horizon <= env.horizon.
[[nodiscard]] TrialResult run_trial(const PolicySpec& policy, const EnvironmentSpec& env,
                                    std::size_t horizon, std::uint64_t seed);

struct CurvePoint {
    std::size_t step = 0;
    double cum_regret = 0.0;
    double cum_reward = 0.0;
};

/// What an experiment keeps per (policy, trial).
struct TrialSummary {
    double cum_reward = 0.0;
    double cum_regret = 0.0;
    std::size_t suboptimal_pulls = 0;
    std::uint64_t seed = 0;
    std::vector<CurvePoint> curve;  ///< at every multiple of the checkpoint stride
};

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation; 0 for one trial
};

/// Mean and sample standard deviation in the given order.
[[nodiscard]] MeanStd mean_std(std::span<const double> xs);

struct PolicyAggregate {
    MeanStd cum_reward;
    MeanStd cum_regret;
    MeanStd suboptimal_pulls;
};

struct ExperimentOptions {
    std::size_t parallel = 1;
    std::size_t checkpoint_stride = 0;  ///< 0 means max(1, horizon / 1000)
};

[[nodiscard]] std::size_t default_checkpoint_stride(std::size_t horizon);

struct ExperimentResult {
    std::vector<std::string> policies;
    std::size_t horizon = 0;
    std::size_t n_trials = 0;
    std::size_t checkpoint_stride = 1;
    std::uint64_t master_seed = 0;
    std::vector<std::vector<TrialSummary>> trials;  ///< [policy][trial]
    std::vector<PolicyAggregate> aggregates;        ///< [policy]
    std::vector<double> runtime_seconds;            ///< [policy], summed over trials

    /// Mean cumulative regret across trials at each checkpoint.
    [[nodiscard]] std::vector<CurvePoint> mean_curve(std::size_t policy) const;
    /// Index of the policy with the given name; throws ConfigError if absent.
    [[nodiscard]] std::size_t index_of(std::string_view name) const;
};

/// Run every policy for `n_trials` trials. Trial i uses trial_seed(master, i)
/// for all policies, so they face the same environment trajectory and reward
/// noise. Output is independent of `options.parallel`.
[[nodiscard]] ExperimentResult run_experiment(std::span<const PolicySpec> policies,
                                              const EnvironmentSpec& env, std::size_t horizon,
                                              std::size_t n_trials, std::uint64_t master_seed,
                                              const ExperimentOptions& options = {});

/// (baseline - candidate) / baseline * 100. Throws UndefinedReduction when
/// baseline <= 0.
[[nodiscard]] double regret_reduction(double baseline, double candidate);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs >= 3 points.
[[nodiscard]] LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// True-parameter gap summary of an environment at step 1 of a trial.
struct GapSummary {
    std::vector<double> gaps;  ///< Delta_k = mu* - mu_k per active arm (0 for the best)
    double min_gap = 0.0;      ///< Delta: smallest positive gap, 0 if none
    double sigma2_max = 0.0;
};

[[nodiscard]] GapSummary gap_summary(const EnvironmentSpec& env, std::uint64_t seed);

struct ScalingSeries {
    std::string policy;
    std::vector<double> mean_regret;      ///< [horizon]
    std::vector<double> mean_suboptimal;  ///< [horizon]
    LinearFit pulls_vs_log_t;
};

struct RegretScalingReport {
    std::vector<std::size_t> horizons;
    ScalingSeries baseline;
    ScalingSeries candidate;
    std::vector<double> reduction_pct;  ///< candidate vs baseline, [horizon]
    GapSummary gaps;
};

/// Run both policies at each horizon and fit suboptimal pulls against ln T.
/// `env.horizon` must cover the largest horizon. Throws ConfigError with
/// fewer than three horizons or if they are not strictly increasing.
[[nodiscard]] RegretScalingReport scaling_check(const PolicySpec& baseline,
                                                const PolicySpec& candidate,
                                                const EnvironmentSpec& env,
                                                std::span<const std::size_t> horizons,
                                                std::size_t n_trials, std::uint64_t master_seed,
                                                const ExperimentOptions& options = {});

}  // namespace raven
