#include "raven/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "raven/error.hpp"
#include "raven/rng.hpp"

namespace raven {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::string_view, 8> kScenarioNames = {
    "stationary", "incremental_drift", "variance_drift", "gradual_drift",
    "localized_jump", "periodic", "blips", "add_remove_arm",
};

constexpr std::array<std::string_view, 9> kPresetNames = {
    "bernoulli-s4.1", "logistics-table2", "logistics-desk", "incremental", "variance-drift",
    "gradual", "periodic", "blips", "add-remove",
};

void check_laws(const std::vector<ArmDistribution>& laws, RewardFamily family,
                std::size_t expected, const std::string& key) {
    if (laws.size() != expected) {
        throw ConfigError(key, "expected " + std::to_string(expected) + " arms, got " +
                                   std::to_string(laws.size()));
    }
    for (const ArmDistribution& d : laws) {
        if (d.family != family) {
            throw ConfigError(key, "mixed reward families");
        }
        if (!std::isfinite(d.mu) || !std::isfinite(d.sigma2)) {
            throw ConfigError(key, "non-finite arm parameter");
        }
        if (family == RewardFamily::bernoulli && (d.mu < 0.0 || d.mu > 1.0)) {
            throw ConfigError(key, "bernoulli mean outside [0, 1]");
        }
        if (family == RewardFamily::gaussian && d.sigma2 < 0.0) {
            throw ConfigError(key, "negative variance");
        }
    }
}

void check_time(std::size_t t, std::size_t horizon, const std::string& key) {
    if (t < 1 || t > horizon) {
        throw ConfigError(key, "change point " + std::to_string(t) + " outside [1, " +
                                   std::to_string(horizon) + "]");
    }
}

ArmDistribution draw_law(SplitMix64& rng, const ParamRanges& r, RewardFamily family) {
    ArmDistribution d;
    d.family = family;
    d.mu = uniform(rng, r.mu_min, r.mu_max);
    d.sigma2 = uniform(rng, r.sigma2_min, r.sigma2_max);
    if (family == RewardFamily::bernoulli) {
        d.sigma2 = 0.0;
    }
    return d;
}

/// Laws in force at step t for the closed-form schedules.
void apply_schedule(EnvironmentState& env, const EnvironmentSpec& spec, std::size_t t,
                    std::uint64_t trial_seed) {
    const RewardFamily family = spec.family();
    const double tt = static_cast<double>(t);
    std::visit(
        Overloaded{
            [&](const Stationary&) {},
            [&](const IncrementalDrift& s) {
                for (std::size_t k = 0; k < env.arms.size(); ++k) {
                    double mu = env.base[k].mu + s.slopes[k] * tt;
                    if (family == RewardFamily::bernoulli) {
                        mu = std::clamp(mu, 0.0, 1.0);
                    }
                    env.arms[k].mu = mu;
                }
            },
            [&](const VarianceDrift& s) {
                for (std::size_t k = 0; k < env.arms.size(); ++k) {
                    env.arms[k].sigma2 = env.base[k].sigma2 + s.rates[k] * tt;
                }
            },
            [&](const GradualDrift& s) {
                if (t < s.t0) {
                    env.arms = env.base;
                } else if (t >= s.t1) {
                    env.arms = s.target;
                } else {
                    const double rho = static_cast<double>(t - s.t0) /
                                       static_cast<double>(s.t1 - s.t0);
                    for (std::size_t k = 0; k < env.arms.size(); ++k) {
                        SplitMix64 coin(stream_seed(trial_seed, StreamPurpose::env_drift, t, k));
                        env.arms[k] = uniform01(coin) < rho ? s.target[k] : env.base[k];
                    }
                }
            },
            [&](const LocalizedJump& s) {
                if (t % s.interval != 0) {
                    return;
                }
                SplitMix64 rng(stream_seed(trial_seed, StreamPurpose::env_drift, t));
                std::vector<std::size_t> order(env.arms.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                // Partial Fisher-Yates: first reset_count entries are the chosen set.
                for (std::size_t i = 0; i < s.reset_count; ++i) {
                    const std::size_t j = i + uniform_index(rng, order.size() - i);
                    std::swap(order[i], order[j]);
                    env.arms[order[i]] = draw_law(rng, s.ranges, family);
                }
            },
            [&](const Periodic& s) {
                std::size_t pos = (t - 1) % s.period();
                for (const PeriodicPhase& phase : s.phases) {
                    if (pos < phase.length) {
                        env.arms = phase.arms;
                        return;
                    }
                    pos -= phase.length;
                }
            },
            [&](const Blips& s) {
                const bool in_blip = t >= s.start && t < s.start + s.duration;
                env.arms = in_blip ? s.blip : env.base;
            },
            [&](const AddRemove& s) {
                env.active[s.added_arm] = t >= s.t_add ? 1 : 0;
                if (t >= s.t_remove) {
                    env.active[s.removed_arm] = 0;
                }
            },
        },
        spec.scenario);
    for (std::size_t k = 0; k < env.arms.size(); ++k) {
        env.means[k] = env.arms[k].mu;
    }
}

double max_over(const std::vector<ArmDistribution>& laws, double init, bool use_sigma) {
    double best = init;
    for (const ArmDistribution& d : laws) {
        best = std::max(best, use_sigma ? d.sigma2 : d.mu);
    }
    return best;
}

std::vector<ArmDistribution> linspace_laws(std::size_t k, double lo, double hi, double sigma2) {
    std::vector<ArmDistribution> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double frac = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
        out[i] = {RewardFamily::gaussian, lo + (hi - lo) * frac, sigma2};
    }
    return out;
}

struct Allowed {
    bool k = true;
    bool mu = true;
    bool sigma2_range = false;
    bool sigma2 = false;
    bool reset_interval = false;
    bool drift_rate = false;
    bool variance_rate = false;
    bool blips = false;
    bool period = false;
};

void reject_unused(const PresetOptions& o, const Allowed& a, std::string_view preset) {
    const auto fail = [&](const char* key) {
        throw ConfigError(key, "not a parameter of preset '" + std::string(preset) + "'");
    };
    if (o.k && !a.k) fail("k");
    if ((o.mu_min || o.mu_max) && !a.mu) fail(o.mu_min ? "mu_min" : "mu_max");
    if (o.sigma2_min && !a.sigma2_range) fail("sigma2_min");
    if (o.sigma2_max && !a.sigma2_range) fail("sigma2_max");
    if (o.sigma2 && !a.sigma2) fail("sigma2");
    if (o.reset_interval && !a.reset_interval) fail("reset_interval");
    if (o.drift_rate && !a.drift_rate) fail("drift_rate");
    if (o.variance_rate && !a.variance_rate) fail("variance_rate");
    if (o.blip_delta && !a.blips) fail("blip_delta");
    if (o.blip_fraction && !a.blips) fail("blip_fraction");
    if (o.period && !a.period) fail("period");
}

}  // namespace

std::string_view to_string(Scenario s) { return kScenarioNames.at(static_cast<std::size_t>(s)); }

void ParamRanges::validate(RewardFamily family) const {
    if (!std::isfinite(mu_min) || !std::isfinite(mu_max) || mu_min > mu_max) {
        throw ConfigError("mu_min", "mean range must be finite and ordered");
    }
    if (family == RewardFamily::bernoulli && (mu_min < 0.0 || mu_max > 1.0)) {
        throw ConfigError("mu_max", "bernoulli mean range must lie in [0, 1]");
    }
    if (!std::isfinite(sigma2_min) || !std::isfinite(sigma2_max) || sigma2_min > sigma2_max) {
        throw ConfigError("sigma2_min", "variance range must be finite and ordered");
    }
    if (sigma2_min < 0.0) {
        throw ConfigError("sigma2_min", "variance range must be nonnegative");
    }
}

std::size_t Periodic::period() const noexcept {
    std::size_t p = 0;
    for (const PeriodicPhase& phase : phases) {
        p += phase.length;
    }
    return p;
}

RewardFamily EnvironmentSpec::family() const {
    if (arms.empty()) {
        throw ConfigError("k", "environment has no arms");
    }
    return arms.front().family;
}

void EnvironmentSpec::validate() const {
    if (arms.empty()) {
        throw ConfigError("k", "environment needs at least one arm");
    }
    if (horizon < 1) {
        throw ConfigError("horizon", "must be >= 1");
    }
    const RewardFamily fam = family();
    const std::size_t k = arms.size();
    check_laws(arms, fam, k, "arms");
    if (initial_draw) {
        initial_draw->validate(fam);
    }
    std::visit(
        Overloaded{
            [](const Stationary&) {},
            [&](const IncrementalDrift& s) {
                if (s.slopes.size() != k) {
                    throw ConfigError("drift_rate", "one slope per arm required");
                }
            },
            [&](const VarianceDrift& s) {
                if (s.rates.size() != k) {
                    throw ConfigError("variance_rate", "one rate per arm required");
                }
                for (double r : s.rates) {
                    if (!std::isfinite(r) || r < 0.0) {
                        throw ConfigError("variance_rate", "g_k(t) must be nonnegative");
                    }
                }
            },
            [&](const GradualDrift& s) {
                check_time(s.t0, horizon, "t0");
                check_time(s.t1, horizon, "t1");
                if (s.t0 >= s.t1) {
                    throw ConfigError("t1", "ramp end must follow ramp start");
                }
                check_laws(s.target, fam, k, "target");
            },
            [&](const LocalizedJump& s) {
                if (s.interval < 1) {
                    throw ConfigError("reset_interval", "must be >= 1");
                }
                if (s.reset_count > k) {
                    throw ConfigError("reset_count", "cannot reset more arms than exist");
                }
                s.ranges.validate(fam);
            },
            [&](const Periodic& s) {
                if (s.phases.empty() || s.period() < 1) {
                    throw ConfigError("period", "periodic schedule needs phases");
                }
                for (const PeriodicPhase& p : s.phases) {
                    if (p.length < 1) {
                        throw ConfigError("period", "phase lengths must be >= 1");
                    }
                    check_laws(p.arms, fam, k, "phases");
                }
            },
            [&](const Blips& s) {
                check_time(s.start, horizon, "blip_start");
                if (s.duration < 1) {
                    throw ConfigError("blip_fraction", "blip must last at least one step");
                }
                check_laws(s.blip, fam, k, "blip");
            },
            [&](const AddRemove& s) {
                check_time(s.t_add, horizon, "t_add");
                check_time(s.t_remove, horizon, "t_remove");
                if (s.t_add > s.t_remove) {
                    throw ConfigError("t_remove", "removal must not precede the addition");
                }
                if (s.added_arm >= k || s.removed_arm >= k || s.added_arm == s.removed_arm) {
                    throw ConfigError("added_arm", "added and removed arms must be distinct slots");
                }
                if (k < 2) {
                    throw ConfigError("k", "add/remove needs at least two arm slots");
                }
            },
        },
        scenario);
}

// ---------------------------------------------------------------------------

EnvironmentState initial_state(const EnvironmentSpec& spec, std::uint64_t trial_seed) {
    spec.validate();
    EnvironmentState env;
    env.base = spec.arms;
    if (spec.initial_draw) {
        SplitMix64 rng(stream_seed(trial_seed, StreamPurpose::env_init));
        for (ArmDistribution& d : env.base) {
            d = draw_law(rng, *spec.initial_draw, spec.family());
        }
    }
    env.arms = env.base;
    env.means.assign(env.arms.size(), 0.0);
    env.active.assign(env.arms.size(), 1);
    if (const auto* s = std::get_if<AddRemove>(&spec.scenario)) {
        env.active[s->added_arm] = 0;
    }
    env.t = 1;
    apply_schedule(env, spec, 1, trial_seed);
    return env;
}

void advance(EnvironmentState& env, const EnvironmentSpec& spec, std::size_t t,
             std::uint64_t trial_seed) {
    if (t != env.t + 1 || t > spec.horizon) {
        throw InvalidStep("cannot advance from step " + std::to_string(env.t) + " to " +
                          std::to_string(t));
    }
    env.t = t;
    apply_schedule(env, spec, t, trial_seed);
}

double sample_reward(const EnvironmentState& env, std::size_t arm, std::uint64_t trial_seed) {
    if (arm >= env.arms.size() || !env.active[arm]) {
        throw InvalidArm("arm " + std::to_string(arm) + " is not active at step " +
                         std::to_string(env.t));
    }
    SplitMix64 rng(stream_seed(trial_seed, StreamPurpose::env_reward, env.t, arm));
    const ArmDistribution& d = env.arms[arm];
    if (d.family == RewardFamily::bernoulli) {
        return uniform01(rng) < d.mu ? 1.0 : 0.0;
    }
    return d.mu + std::sqrt(d.sigma2) * standard_normal(rng);
}

OracleBest oracle_best(const EnvironmentState& env) {
    OracleBest best{env.arms.size(), 0.0};
    for (std::size_t k = 0; k < env.arms.size(); ++k) {
        if (env.active[k] && (best.arm == env.arms.size() || env.arms[k].mu > best.mean)) {
            best = {k, env.arms[k].mu};
        }
    }
    if (best.arm == env.arms.size()) {
        throw InvalidArm("no active arm at step " + std::to_string(env.t));
    }
    return best;
}

double reward_range_bound(const EnvironmentSpec& spec) {
    if (spec.family() == RewardFamily::bernoulli) {
        return 1.0;
    }
    double mu_max = max_over(spec.arms, -INFINITY, false);
    double s2_max = max_over(spec.arms, 0.0, true);
    const double horizon = static_cast<double>(spec.horizon);
    const auto include_ranges = [&](const ParamRanges& r) {
        mu_max = std::max(mu_max, r.mu_max);
        s2_max = std::max(s2_max, r.sigma2_max);
    };
    if (spec.initial_draw) {
        include_ranges(*spec.initial_draw);
    }
    std::visit(Overloaded{
                   [](const Stationary&) {},
                   [&](const IncrementalDrift& s) {
                       for (std::size_t k = 0; k < spec.arms.size(); ++k) {
                           mu_max = std::max(mu_max, spec.arms[k].mu + s.slopes[k] * horizon);
                       }
                   },
                   [&](const VarianceDrift& s) {
                       for (std::size_t k = 0; k < spec.arms.size(); ++k) {
                           s2_max = std::max(s2_max, spec.arms[k].sigma2 + s.rates[k] * horizon);
                       }
                   },
                   [&](const GradualDrift& s) {
                       mu_max = max_over(s.target, mu_max, false);
                       s2_max = max_over(s.target, s2_max, true);
                   },
                   [&](const LocalizedJump& s) { include_ranges(s.ranges); },
                   [&](const Periodic& s) {
                       for (const PeriodicPhase& p : s.phases) {
                           mu_max = max_over(p.arms, mu_max, false);
                           s2_max = max_over(p.arms, s2_max, true);
                       }
                   },
                   [&](const Blips& s) {
                       mu_max = max_over(s.blip, mu_max, false);
                       s2_max = max_over(s.blip, s2_max, true);
                   },
                   [](const AddRemove&) {},
               },
               spec.scenario);
    return mu_max + 3.0 * std::sqrt(s2_max);
}

Trajectory record_trajectory(const EnvironmentSpec& spec, std::uint64_t trial_seed) {
    Trajectory out;
    out.arms.reserve(spec.horizon);
    out.active.reserve(spec.horizon);
    EnvironmentState env = initial_state(spec, trial_seed);
    for (std::size_t t = 1; t <= spec.horizon; ++t) {
        if (t > 1) {
            advance(env, spec, t, trial_seed);
        }
        out.arms.push_back(env.arms);
        out.active.push_back(env.active);
    }
    return out;
}

// ---------------------------------------------------------------------------

EnvironmentSpec make_bernoulli_experiment(std::size_t k, double mu_min, double mu_max,
                                          std::uint64_t seed, std::size_t horizon) {
    ParamRanges ranges{mu_min, mu_max, 0.0, 0.0};
    ranges.validate(RewardFamily::bernoulli);
    if (k < 1) {
        throw ConfigError("k", "must be >= 1");
    }
    EnvironmentSpec spec;
    spec.name = "bernoulli-s4.1";
    spec.horizon = horizon;
    spec.scenario = Stationary{};
    SplitMix64 rng(stream_seed(seed, StreamPurpose::env_init));
    spec.arms.resize(k);
    for (ArmDistribution& d : spec.arms) {
        d = draw_law(rng, ranges, RewardFamily::bernoulli);
    }
    spec.validate();
    return spec;
}

EnvironmentSpec make_logistics_env(const LogisticsParams& p) {
    if (p.k < 1) {
        throw ConfigError("k", "must be >= 1");
    }
    if (p.horizon < 1) {
        throw ConfigError("horizon", "must be >= 1");
    }
    if (p.reset_interval < 1) {
        throw ConfigError("reset_interval", "must be >= 1");
    }
    ParamRanges ranges{p.mu_min, p.mu_max, p.sigma2_min, p.sigma2_max};
    ranges.validate(RewardFamily::gaussian);

    EnvironmentSpec spec;
    spec.name = "logistics";
    spec.horizon = p.horizon;
    spec.arms.assign(p.k, ArmDistribution{RewardFamily::gaussian, p.mu_min, p.sigma2_min});
    spec.initial_draw = ranges;
    spec.scenario = LocalizedJump{p.reset_interval, ranges, p.k / 3};
    spec.validate();
    return spec;
}

std::span<const std::string_view> preset_names() { return kPresetNames; }

PresetDefaults preset_defaults(std::string_view name) {
    if (name == "bernoulli-s4.1") return {5000, 50};
    if (name == "logistics-table2") return {50000, 50};
    if (name == "logistics-desk") return {10000, 20};
    if (std::find(kPresetNames.begin(), kPresetNames.end(), name) != kPresetNames.end()) {
        return {10000, 20};
    }
    throw ConfigError("env", "unknown environment preset '" + std::string(name) + "'");
}

PresetOptions resolve_preset_options(std::string_view name, const PresetOptions& o) {
    const PresetDefaults defaults = preset_defaults(name);
    PresetOptions r = o;
    r.horizon = o.horizon.value_or(defaults.horizon);
    if (name == "bernoulli-s4.1") {
        reject_unused(o, {}, name);
        r.k = o.k.value_or(10);
        r.mu_min = o.mu_min.value_or(0.8);
        r.mu_max = o.mu_max.value_or(0.95);
        return r;
    }
    if (name == "logistics-table2" || name == "logistics-desk") {
        reject_unused(o, {.sigma2_range = true, .reset_interval = true}, name);
        const LogisticsParams p =
            name == "logistics-table2" ? LogisticsParams::table2() : LogisticsParams::desk();
        r.k = o.k.value_or(p.k);
        r.mu_min = o.mu_min.value_or(p.mu_min);
        r.mu_max = o.mu_max.value_or(p.mu_max);
        r.sigma2_min = o.sigma2_min.value_or(p.sigma2_min);
        r.sigma2_max = o.sigma2_max.value_or(p.sigma2_max);
        r.reset_interval = o.reset_interval.value_or(p.reset_interval);
        return r;
    }
    Allowed allowed{.sigma2 = true};
    if (name == "incremental") allowed.drift_rate = true;
    if (name == "variance-drift") allowed.variance_rate = true;
    if (name == "periodic") allowed.period = true;
    if (name == "blips") allowed.blips = true;
    reject_unused(o, allowed, name);
    r.k = o.k.value_or(5);
    r.mu_min = o.mu_min.value_or(0.3);
    r.mu_max = o.mu_max.value_or(0.7);
    r.sigma2 = o.sigma2.value_or(0.01);
    if (allowed.drift_rate) r.drift_rate = o.drift_rate.value_or(5e-5);
    if (allowed.variance_rate) r.variance_rate = o.variance_rate.value_or(1e-5);
    if (allowed.period) r.period = o.period.value_or(1000);
    if (allowed.blips) {
        r.blip_delta = o.blip_delta.value_or(-0.3);
        r.blip_fraction = o.blip_fraction.value_or(0.05);
    }
    return r;
}

EnvironmentSpec make_preset(std::string_view name, const PresetOptions& options,
                            std::uint64_t seed) {
    const PresetOptions o = resolve_preset_options(name, options);
    const std::size_t horizon = *o.horizon;
    EnvironmentSpec spec;

    if (name == "bernoulli-s4.1") {
        spec = make_bernoulli_experiment(*o.k, *o.mu_min, *o.mu_max, seed, horizon);
    } else if (name == "logistics-table2" || name == "logistics-desk") {
        spec = make_logistics_env(
            {*o.k, *o.mu_min, *o.mu_max, *o.sigma2_min, *o.sigma2_max, *o.reset_interval, horizon});
    } else {
        // Synthetic Gaussian presets: K arms with means evenly spaced on
        // [mu_min, mu_max] and a common base variance.
        const std::size_t k = *o.k;
        if (k < 1) {
            throw ConfigError("k", "must be >= 1");
        }
        const double lo = *o.mu_min;
        const double hi = *o.mu_max;
        if (!(lo <= hi)) {
            throw ConfigError("mu_min", "mean range must be ordered");
        }
        const double sigma2 = *o.sigma2;
        if (!(sigma2 >= 0.0)) {
            throw ConfigError("sigma2", "must be >= 0");
        }
        spec.horizon = horizon;
        spec.arms = linspace_laws(k, lo, hi, sigma2);
        std::vector<ArmDistribution> reversed(spec.arms.rbegin(), spec.arms.rend());
        const auto at_fraction = [&](double f) {
            return std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(f * static_cast<double>(horizon))), 1,
                horizon);
        };

        if (name == "incremental") {
            // Best arm drifts down, worst drifts up; the order inverts mid-run.
            IncrementalDrift s;
            for (std::size_t i = 0; i < k; ++i) {
                const double w =
                    k == 1 ? 1.0
                           : (static_cast<double>(k - 1) - 2.0 * static_cast<double>(i)) /
                                 static_cast<double>(k - 1);
                s.slopes.push_back(*o.drift_rate * w);
            }
            spec.scenario = s;
        } else if (name == "variance-drift") {
            if (!(*o.variance_rate >= 0.0)) {
                throw ConfigError("variance_rate", "must be >= 0");
            }
            spec.scenario = VarianceDrift{std::vector<double>(k, *o.variance_rate)};
        } else if (name == "gradual") {
            if (horizon < 2) {
                throw ConfigError("horizon", "gradual drift needs at least two steps");
            }
            const std::size_t t0 = std::min(at_fraction(1.0 / 3.0), horizon - 1);
            const std::size_t t1 = std::max(at_fraction(2.0 / 3.0), t0 + 1);
            spec.scenario = GradualDrift{t0, t1, reversed};
        } else if (name == "periodic") {
            const std::size_t period = *o.period;
            if (period < 2) {
                throw ConfigError("period", "must be >= 2");
            }
            Periodic s;
            s.phases.push_back({period / 2, spec.arms});
            s.phases.push_back({period - period / 2, reversed});
            spec.scenario = s;
        } else if (name == "blips") {
            const double fraction = *o.blip_fraction;
            if (!(fraction > 0.0 && fraction <= 1.0)) {
                throw ConfigError("blip_fraction", "must lie in (0, 1]");
            }
            Blips s;
            s.start = at_fraction(0.5);
            s.duration = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(horizon))));
            s.blip = spec.arms;
            s.blip.back().mu += *o.blip_delta;
            spec.scenario = s;
        } else if (name == "add-remove") {
            if (k < 3) {
                throw ConfigError("k", "add-remove needs at least three arm slots");
            }
            // Slots 0..k-2 start active; slot k-1 opens at T/3 with a leading
            // mean, and the best original arm closes at 2T/3.
            spec.arms = linspace_laws(k - 1, lo, hi, sigma2);
            spec.arms.push_back({RewardFamily::gaussian, hi + 0.1, sigma2});
            spec.scenario =
                AddRemove{at_fraction(1.0 / 3.0), at_fraction(2.0 / 3.0), k - 1, k - 2};
        }
    }
    spec.name = std::string(name);
    spec.validate();
    return spec;
}

}  // namespace raven
