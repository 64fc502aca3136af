#include "raven/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "raven/error.hpp"
#include "raven/parallel.hpp"
#include "raven/rng.hpp"

namespace raven {

namespace {

/// Shared simulation loop. `sink(t, arm, reward, regret, suboptimal)` is
/// called once per step.
template <class Sink>
void simulate(const PolicySpec& spec, const EnvironmentSpec& env, std::size_t horizon,
              std::uint64_t seed, Sink&& sink) {
    if (horizon > env.horizon) {
        throw ConfigError("horizon", "run horizon " + std::to_string(horizon) +
                                         " exceeds the environment schedule (" +
                                         std::to_string(env.horizon) + ")");
    }
    EnvironmentState state = initial_state(env, seed);
    const auto active0 =
        static_cast<std::size_t>(std::count(state.active.begin(), state.active.end(), 1));
    if (horizon < active0) {
        throw ConfigError("horizon", "horizon must be at least the number of arms");
    }
    const ArmSetInfo info{env.arm_slots(), env.family(), reward_range_bound(env)};
    auto policy = make_policy(spec, info, stream_seed(seed, StreamPurpose::policy));

    for (std::size_t t = 1; t <= horizon; ++t) {
        try {
            if (t > 1) {
                advance(state, env, t, seed);
            }
            const std::size_t arm = policy->select({state.active, state.means});
            const double reward = sample_reward(state, arm, seed);
            policy->observe(arm, reward);
            const OracleBest best = oracle_best(state);
            sink(t, arm, reward, best.mean - state.means[arm], arm != best.arm);
        } catch (const TrialFailure&) {
            throw;
        } catch (const Error& e) {
            throw TrialFailure(t, e.what());
        }
    }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) {
    return derive_seed(master_seed, {0x747269616cULL, index});
}

TrialResult run_trial(const PolicySpec& policy, const EnvironmentSpec& env, std::size_t horizon,
                      std::uint64_t seed) {
    TrialResult out;
    out.seed = seed;
    out.chosen_arms.reserve(horizon);
    out.rewards.reserve(horizon);
    out.inst_regret.reserve(horizon);
    simulate(policy, env, horizon, seed,
             [&](std::size_t, std::size_t arm, double reward, double regret, bool suboptimal) {
                 out.chosen_arms.push_back(arm);
                 out.rewards.push_back(reward);
                 out.inst_regret.push_back(regret);
                 out.cum_reward += reward;
                 out.cum_regret += regret;
                 out.suboptimal_pulls += suboptimal ? 1 : 0;
             });
    return out;
}

MeanStd mean_std(std::span<const double> xs) {
    const Moments m = batch_oracle(xs);
    return {m.mean, std::sqrt(m.variance)};
}

std::size_t default_checkpoint_stride(std::size_t horizon) {
    return std::max<std::size_t>(1, horizon / 1000);
}

std::vector<CurvePoint> ExperimentResult::mean_curve(std::size_t policy) const {
    const auto& runs = trials.at(policy);
    std::vector<CurvePoint> out;
    if (runs.empty()) {
        return out;
    }
    out.resize(runs.front().curve.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c].step = runs.front().curve[c].step;
        for (const TrialSummary& s : runs) {
            out[c].cum_regret += s.curve[c].cum_regret;
            out[c].cum_reward += s.curve[c].cum_reward;
        }
        out[c].cum_regret /= static_cast<double>(runs.size());
        out[c].cum_reward /= static_cast<double>(runs.size());
    }
    return out;
}

std::size_t ExperimentResult::index_of(std::string_view name) const {
    const auto it = std::find(policies.begin(), policies.end(), name);
    if (it == policies.end()) {
        throw ConfigError("policies", "no policy named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - policies.begin());
}

ExperimentResult run_experiment(std::span<const PolicySpec> policies, const EnvironmentSpec& env,
                                std::size_t horizon, std::size_t n_trials,
                                std::uint64_t master_seed, const ExperimentOptions& options) {
    if (n_trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    if (policies.empty()) {
        throw ConfigError("policies", "at least one policy required");
    }
    for (const PolicySpec& p : policies) {
        p.validate();
    }
    env.validate();

    ExperimentResult result;
    result.horizon = horizon;
    result.n_trials = n_trials;
    result.master_seed = master_seed;
    result.checkpoint_stride =
        options.checkpoint_stride == 0 ? default_checkpoint_stride(horizon) : options.checkpoint_stride;
    for (const PolicySpec& p : policies) {
        result.policies.push_back(p.name);
    }
    result.trials.assign(policies.size(), std::vector<TrialSummary>(n_trials));
    std::vector<double> item_seconds(policies.size() * n_trials, 0.0);

    const std::size_t stride = result.checkpoint_stride;
    parallel_for(policies.size() * n_trials, options.parallel, [&](std::size_t item) {
        const std::size_t p = item / n_trials;
        const std::size_t trial = item % n_trials;
        const auto start = std::chrono::steady_clock::now();
        TrialSummary& s = result.trials[p][trial];
        s.seed = trial_seed(master_seed, trial);
        s.curve.reserve(horizon / stride);
        try {
            simulate(policies[p], env, horizon, s.seed,
                     [&](std::size_t t, std::size_t, double reward, double regret, bool suboptimal) {
                         s.cum_reward += reward;
                         s.cum_regret += regret;
                         s.suboptimal_pulls += suboptimal ? 1 : 0;
                         if (t % stride == 0) {
                             s.curve.push_back({t, s.cum_regret, s.cum_reward});
                         }
                     });
        } catch (const Error& e) {
            throw Error("trial " + std::to_string(trial) + " of policy '" + policies[p].name +
                        "': " + e.what());
        }
        item_seconds[item] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    result.aggregates.resize(policies.size());
    result.runtime_seconds.assign(policies.size(), 0.0);
    std::vector<double> reward(n_trials), regret(n_trials), pulls(n_trials);
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (std::size_t i = 0; i < n_trials; ++i) {
            const TrialSummary& s = result.trials[p][i];
            reward[i] = s.cum_reward;
            regret[i] = s.cum_regret;
            pulls[i] = static_cast<double>(s.suboptimal_pulls);
            result.runtime_seconds[p] += item_seconds[p * n_trials + i];
        }
        result.aggregates[p] = {mean_std(reward), mean_std(regret), mean_std(pulls)};
    }
    return result;
}

double regret_reduction(double baseline, double candidate) {
    if (!(baseline > 0.0)) {
        throw UndefinedReduction("regret reduction needs a positive baseline regret");
    }
    return (baseline - candidate) / baseline * 100.0;
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw ConfigError("horizons", "fit needs paired samples");
    }
    if (xs.size() < 3) {
        throw ConfigError("horizons", "fit needs at least 3 points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        throw ConfigError("horizons", "fit needs distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

GapSummary gap_summary(const EnvironmentSpec& env, std::uint64_t seed) {
    const EnvironmentState state = initial_state(env, seed);
    const OracleBest best = oracle_best(state);
    GapSummary out;
    for (std::size_t k = 0; k < state.arms.size(); ++k) {
        if (!state.active[k]) {
            continue;
        }
        const double gap = best.mean - state.arms[k].mu;
        out.gaps.push_back(gap);
        if (gap > 0.0 && (out.min_gap == 0.0 || gap < out.min_gap)) {
            out.min_gap = gap;
        }
        out.sigma2_max = std::max(out.sigma2_max, state.arms[k].variance());
    }
    return out;
}

RegretScalingReport scaling_check(const PolicySpec& baseline, const PolicySpec& candidate,
                                  const EnvironmentSpec& env,
                                  std::span<const std::size_t> horizons, std::size_t n_trials,
                                  std::uint64_t master_seed, const ExperimentOptions& options) {
    if (horizons.size() < 3) {
        throw ConfigError("horizons", "scaling fit needs at least 3 horizons");
    }
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        if (horizons[i] <= horizons[i - 1]) {
            throw ConfigError("horizons", "horizons must be strictly increasing");
        }
    }
    RegretScalingReport report;
    report.horizons.assign(horizons.begin(), horizons.end());
    report.baseline.policy = baseline.name;
    report.candidate.policy = candidate.name;
    report.gaps = gap_summary(env, trial_seed(master_seed, 0));

    const std::vector<PolicySpec> pair = {baseline, candidate};
    std::vector<double> log_t;
    for (std::size_t T : horizons) {
        const ExperimentResult r = run_experiment(pair, env, T, n_trials, master_seed, options);
        report.baseline.mean_regret.push_back(r.aggregates[0].cum_regret.mean);
        report.baseline.mean_suboptimal.push_back(r.aggregates[0].suboptimal_pulls.mean);
        report.candidate.mean_regret.push_back(r.aggregates[1].cum_regret.mean);
        report.candidate.mean_suboptimal.push_back(r.aggregates[1].suboptimal_pulls.mean);
        report.reduction_pct.push_back(regret_reduction(r.aggregates[0].cum_regret.mean,
                                                        r.aggregates[1].cum_regret.mean));
        log_t.push_back(std::log(static_cast<double>(T)));
    }
    report.baseline.pulls_vs_log_t = fit_line(log_t, report.baseline.mean_suboptimal);
    report.candidate.pulls_vs_log_t = fit_line(log_t, report.candidate.mean_suboptimal);
    return report;
}

}  // namespace raven
