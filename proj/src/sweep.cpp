#include "raven/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "raven/error.hpp"
#include "raven/rng.hpp"

namespace raven {

namespace {

std::uint64_t hash_name(const std::string& s) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

void check_interval(const Interval& r, const char* key) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo > 0.0 && r.lo <= r.hi)) {
        throw ConfigError(key, "search range must be positive and ordered");
    }
}

}  // namespace

void SweepGrid::validate() const {
    if (alpha0_values.empty()) throw ConfigError("alpha0", "grid needs at least one value");
    if (beta0_values.empty()) throw ConfigError("beta0", "grid needs at least one value");
    if (scenarios.empty()) throw ConfigError("scenarios", "grid needs at least one scenario");
    if (horizons.empty()) throw ConfigError("horizons", "grid needs at least one horizon");
    for (double a : alpha0_values) {
        RavenConfig{a, 0.0, epsilon}.validate();
    }
    for (double b : beta0_values) {
        RavenConfig{1.0, b, epsilon}.validate();
    }
    for (const std::string& s : scenarios) {
        (void)preset_defaults(s);
    }
    for (std::size_t h : horizons) {
        if (h < 1) throw ConfigError("horizons", "must be >= 1");
    }
}

std::optional<SweepCell> SweepResult::argmin(const std::string& scenario,
                                             std::size_t horizon) const {
    std::optional<SweepCell> best;
    for (const SweepCell& c : cells) {
        if (c.scenario == scenario && c.horizon == horizon &&
            (!best || c.mean_regret < best->mean_regret)) {
            best = c;
        }
    }
    return best;
}

std::uint64_t sweep_block_seed(std::uint64_t master_seed, const std::string& scenario,
                               std::size_t horizon) {
    return derive_seed(master_seed, {hash_name(scenario), horizon});
}

SweepResult grid_sweep(const SweepGrid& grid, std::size_t n_trials, std::uint64_t master_seed,
                       const ExperimentOptions& options) {
    grid.validate();
    SweepResult out;
    for (const std::string& scenario : grid.scenarios) {
        for (std::size_t horizon : grid.horizons) {
            PresetOptions preset;
            preset.horizon = horizon;
            const EnvironmentSpec env = make_preset(scenario, preset, master_seed);

            std::vector<PolicySpec> policies;
            for (double a : grid.alpha0_values) {
                for (double b : grid.beta0_values) {
                    policies.emplace_back(RavenConfig{a, b, grid.epsilon});
                }
            }
            const ExperimentResult r =
                run_experiment(policies, env, horizon, n_trials,
                               sweep_block_seed(master_seed, scenario, horizon), options);
            std::size_t i = 0;
            for (double a : grid.alpha0_values) {
                for (double b : grid.beta0_values) {
                    const PolicyAggregate& agg = r.aggregates[i++];
                    out.cells.push_back(
                        {scenario, horizon, a, b, agg.cum_regret.mean, agg.cum_regret.stddev});
                }
            }
        }
    }
    return out;
}

void SearchRanges::validate() const {
    check_interval(alpha0, "alpha0");
    check_interval(beta0, "beta0");
    check_interval(epsilon, "epsilon");
    if (epsilon.hi > 0.5) {
        throw ConfigError("epsilon", "upper bound must not exceed 0.5");
    }
}

RavenConfig sample_candidate(const SearchRanges& ranges, std::uint64_t master_seed, std::size_t i) {
    SplitMix64 rng(stream_seed(master_seed, StreamPurpose::search, i));
    RavenConfig cfg;
    cfg.alpha0 = log_uniform(rng, ranges.alpha0.lo, ranges.alpha0.hi);
    cfg.beta0 = log_uniform(rng, ranges.beta0.lo, ranges.beta0.hi);
    cfg.epsilon = log_uniform(rng, ranges.epsilon.lo, ranges.epsilon.hi);
    // exp(log(hi)) can land one ulp outside the range.
    cfg.alpha0 = std::clamp(cfg.alpha0, ranges.alpha0.lo, ranges.alpha0.hi);
    cfg.beta0 = std::clamp(cfg.beta0, ranges.beta0.lo, ranges.beta0.hi);
    cfg.epsilon = std::clamp(cfg.epsilon, ranges.epsilon.lo, ranges.epsilon.hi);
    return cfg;
}

TuneResult random_search(const SearchRanges& ranges, std::size_t n_candidates,
                         const EnvironmentSpec& env, std::size_t horizon, std::size_t n_trials,
                         std::uint64_t master_seed, const ExperimentOptions& options) {
    ranges.validate();
    if (n_candidates < 1) {
        throw ConfigError("candidates", "must be >= 1");
    }
    std::vector<PolicySpec> policies;
    TuneResult out;
    for (std::size_t i = 0; i < n_candidates; ++i) {
        const RavenConfig cfg = sample_candidate(ranges, master_seed, i);
        out.candidates.push_back({cfg, 0.0});
        policies.emplace_back(cfg, "candidate_" + std::to_string(i));
    }
    const ExperimentResult r = run_experiment(policies, env, horizon, n_trials, master_seed, options);
    for (std::size_t i = 0; i < n_candidates; ++i) {
        out.candidates[i].mean_regret = r.aggregates[i].cum_regret.mean;
        if (out.candidates[i].mean_regret < out.candidates[out.best].mean_regret) {
            out.best = i;
        }
    }
    return out;
}

}  // namespace raven
