#include "raven/commands.hpp"

#include <cstdio>
#include <string>

#include "raven/rng.hpp"
#include "raven/streaming_stats.hpp"

namespace raven {

namespace {

std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

void print_experiment(const ExperimentResult& r, std::ostream& log) {
    log << "policy,mean_reward,mean_regret,std_regret,mean_suboptimal_pulls,runtime_s\n";
    for (std::size_t p : name_order(r.policies)) {
        const PolicyAggregate& a = r.aggregates[p];
        log << r.policies[p] << ',' << fixed(a.cum_reward.mean, 1) << ','
            << fixed(a.cum_regret.mean, 1) << ',' << fixed(a.cum_regret.stddev, 1) << ','
            << fixed(a.suboptimal_pulls.mean, 1) << ',' << fixed(r.runtime_seconds[p], 3) << '\n';
    }
}

// Wall-clock time is kept out of the CSVs so reruns stay byte-identical.
void write_runtime(const ExperimentResult& r, const std::filesystem::path& dir) {
    nlohmann::json j;
    for (std::size_t p = 0; p < r.policies.size(); ++p) {
        j[r.policies[p]] = r.runtime_seconds[p];
    }
    write_file(dir, "runtime.json", j.dump(2) + "\n");
}

}  // namespace

std::vector<MomentsRow> sample_moments(std::span<const std::size_t> sizes, std::size_t trials,
                                       std::uint64_t seed) {
    std::vector<MomentsRow> rows;
    for (std::size_t n : sizes) {
        for (std::size_t i = 0; i < trials; ++i) {
            SplitMix64 rng(derive_seed(seed, {0x6d6f6dULL, n, i}));
            StreamingStats s;
            for (std::size_t j = 0; j < n; ++j) {
                s.update(standard_normal(rng));
            }
            rows.push_back({n, i, s.mean(), s.variance()});
        }
    }
    return rows;
}

void execute(const RunConfig& c, std::ostream& log) {
    const std::filesystem::path dir = c.out_dir;
    write_file(dir, "config.echo", to_json(c).dump(2) + "\n");
    const ExperimentOptions options = c.experiment_options();

    switch (c.command) {
        case Command::run:
        case Command::compare: {
            const EnvironmentSpec env = c.environment();
            const ExperimentResult r =
                run_experiment(c.policies, env, c.horizon, c.trials, c.seed, options);
            export_experiment(r, dir);
            write_runtime(r, dir);
            print_experiment(r, log);
            break;
        }
        case Command::sweep: {
            const SweepResult r = grid_sweep(c.sweep, c.trials, c.seed, options);
            export_sweep(r, dir);
            for (const std::string& scenario : c.sweep.scenarios) {
                for (std::size_t T : c.sweep.horizons) {
                    const SweepCell best = *r.argmin(scenario, T);
                    log << scenario << " T=" << T << ": best alpha0=" << best.alpha0
                        << " beta0=" << best.beta0 << " regret=" << fixed(best.mean_regret)
                        << '\n';
                }
            }
            break;
        }
        case Command::tune: {
            const EnvironmentSpec env = c.environment();
            const TuneResult r = random_search(c.tune.ranges, c.tune.candidates, env, c.horizon,
                                               c.trials, c.seed, options);
            export_tune(r, dir);
            const TuneCandidate& best = r.best_candidate();
            log << "best candidate " << r.best << ": alpha0=" << format_real(best.config.alpha0)
                << " beta0=" << format_real(best.config.beta0)
                << " epsilon=" << format_real(best.config.epsilon)
                << " mean_regret=" << fixed(best.mean_regret) << '\n';
            break;
        }
        case Command::scaling: {
            const EnvironmentSpec env = c.environment();
            const RegretScalingReport r = scaling_check(c.policies[0], c.policies[1], env,
                                                        c.scaling.horizons, c.trials, c.seed,
                                                        options);
            export_scaling(r, dir);
            log << "horizon,reduction_pct\n";
            for (std::size_t h = 0; h < r.horizons.size(); ++h) {
                log << r.horizons[h] << ',' << fixed(r.reduction_pct[h]) << '\n';
            }
            for (const ScalingSeries* s : {&r.baseline, &r.candidate}) {
                log << s->policy << ": pulls = " << fixed(s->pulls_vs_log_t.slope) << " ln T + "
                    << fixed(s->pulls_vs_log_t.intercept)
                    << ", R^2 = " << fixed(s->pulls_vs_log_t.r_squared, 4) << '\n';
            }
            break;
        }
        case Command::moments: {
            export_moments(sample_moments(c.moments.sizes, c.trials, c.seed), dir);
            log << "wrote " << (dir / "moments.csv").string() << '\n';
            break;
        }
    }
}

}  // namespace raven
