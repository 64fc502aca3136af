#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "raven/environments.hpp"
#include "raven/harness.hpp"
#include "raven/policies.hpp"

namespace raven {

/// Cartesian grid over (alpha0, beta0) at fixed epsilon, per scenario preset
/// and horizon.
struct SweepGrid {
    std::vector<double> alpha0_values = {0.5, 1.0, 5.0, 10.0};
    std::vector<double> beta0_values = {0.5, 1.0, 5.0, 10.0};
    double epsilon = 1e-3;
    std::vector<std::string> scenarios = {"variance-drift", "incremental", "blips"};
    std::vector<std::size_t> horizons = {1000, 10000};

    /// Throws ConfigError for empty lists, unknown presets or bad values.
    void validate() const;

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

struct SweepCell {
    std::string scenario;
    std::size_t horizon = 0;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double mean_regret = 0.0;
    double std_regret = 0.0;
};

struct SweepResult {
    /// Row order: scenario, horizon, alpha0, beta0 as listed in the grid.
    std::vector<SweepCell> cells;

    /// Lowest-regret cell for (scenario, horizon); first listed on ties.
    [[nodiscard]] std::optional<SweepCell> argmin(const std::string& scenario,
                                                  std::size_t horizon) const;
};

/// Trial seeds for one (scenario, horizon) block. Keyed by identity, never by
/// iteration order, so removing grid entries leaves other cells unchanged
/// and every cell of a block faces the same trajectories.
[[nodiscard]] std::uint64_t sweep_block_seed(std::uint64_t master_seed, const std::string& scenario,
                                             std::size_t horizon);

[[nodiscard]] SweepResult grid_sweep(const SweepGrid& grid, std::size_t n_trials,
                                     std::uint64_t master_seed,
                                     const ExperimentOptions& options = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct SearchRanges {
    Interval alpha0{0.01, 10.0};
    Interval beta0{0.01, 10.0};
    Interval epsilon{1e-3, 0.5};

    void validate() const;
    friend bool operator==(const SearchRanges&, const SearchRanges&) = default;
};

struct TuneCandidate {
    RavenConfig config;
    double mean_regret = 0.0;
};

struct TuneResult {
    std::vector<TuneCandidate> candidates;  ///< in sampling order
    std::size_t best = 0;                   ///< index of the minimizer, first on ties

    [[nodiscard]] const TuneCandidate& best_candidate() const { return candidates.at(best); }
};

/// Candidate i for a search seeded by `master_seed`; each coordinate is
/// log-uniform on its range.
[[nodiscard]] RavenConfig sample_candidate(const SearchRanges& ranges, std::uint64_t master_seed,
                                           std::size_t i);

/// Seeded random search over RAVEN-UCB hyperparameters, scored by mean
/// cumulative regret over `n_trials` trials.
[[nodiscard]] TuneResult random_search(const SearchRanges& ranges, std::size_t n_candidates,
                                       const EnvironmentSpec& env, std::size_t horizon,
                                       std::size_t n_trials, std::uint64_t master_seed,
                                       const ExperimentOptions& options = {});

}  // namespace raven
