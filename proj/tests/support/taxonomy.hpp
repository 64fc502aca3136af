#pragma once

// Brute-force checks of a recorded trajectory against the defining equation
// of its scenario. Each returns an empty string on success and a description
// of the first violation otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>

#include "raven/environments.hpp"

namespace raven::testing {

namespace detail {

inline bool same_laws(const std::vector<ArmDistribution>& a, const std::vector<ArmDistribution>& b) {
    return a == b;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace detail

inline std::string check_trajectory(const EnvironmentSpec& spec, std::uint64_t seed,
                                    const Trajectory& tr) {
    const EnvironmentState s0 = initial_state(spec, seed);
    const std::vector<ArmDistribution>& base = s0.base;
    const std::size_t T = spec.horizon;
    const std::size_t K = spec.arm_slots();
    std::ostringstream err;
    const auto fail = [&](std::size_t t, const std::string& what) {
        err << spec.name << ": t=" << t << ": " << what;
        return err.str();
    };
    if (tr.arms.size() != T || tr.active.size() != T) {
        return fail(0, "trajectory length differs from horizon");
    }
    const ArmMask all(K, 1);

    return std::visit(
        detail::Overloaded{
            [&](const Stationary&) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    if (tr.arms[t - 1] != base) return fail(t, "laws changed");
                    if (tr.active[t - 1] != all) return fail(t, "active set changed");
                }
                return {};
            },
            [&](const IncrementalDrift& s) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    for (std::size_t k = 0; k < K; ++k) {
                        double mu = base[k].mu + s.slopes[k] * static_cast<double>(t);
                        if (spec.family() == RewardFamily::bernoulli) mu = std::clamp(mu, 0.0, 1.0);
                        if (tr.arms[t - 1][k].mu != mu) return fail(t, "mean off the linear drift");
                        if (tr.arms[t - 1][k].sigma2 != base[k].sigma2) return fail(t, "variance moved");
                    }
                }
                return {};
            },
            [&](const VarianceDrift& s) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    for (std::size_t k = 0; k < K; ++k) {
                        const double v = base[k].sigma2 + s.rates[k] * static_cast<double>(t);
                        if (tr.arms[t - 1][k].sigma2 != v) return fail(t, "variance off g_k(t)");
                        if (tr.arms[t - 1][k].mu != base[k].mu) return fail(t, "mean moved");
                    }
                }
                return {};
            },
            [&](const GradualDrift& s) -> std::string {
                double new_share = 0.0;
                double rho_sum = 0.0;
                std::size_t ramp_draws = 0;
                for (std::size_t t = 1; t <= T; ++t) {
                    const auto& laws = tr.arms[t - 1];
                    if (t < s.t0 && laws != base) return fail(t, "left the old law before t0");
                    if (t >= s.t1 && laws != s.target) return fail(t, "not on the new law after t1");
                    if (t >= s.t0 && t < s.t1) {
                        const double rho = static_cast<double>(t - s.t0) /
                                           static_cast<double>(s.t1 - s.t0);
                        for (std::size_t k = 0; k < K; ++k) {
                            const bool is_new = laws[k] == s.target[k];
                            if (!is_new && laws[k] != base[k]) return fail(t, "law is neither old nor new");
                            if (s.target[k] == base[k]) continue;
                            new_share += is_new ? 1.0 : 0.0;
                            rho_sum += rho;
                            ++ramp_draws;
                        }
                    }
                }
                // The share of new-law draws over the ramp tracks the mean of rho.
                const double n = static_cast<double>(ramp_draws);
                if (n >= 500 && std::abs(new_share - rho_sum) / n > 0.05) {
                    return fail(s.t0, "ramp share " + std::to_string(new_share / n) +
                                          " vs rho " + std::to_string(rho_sum / n));
                }
                return {};
            },
            [&](const LocalizedJump& s) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    const auto& prev = t == 1 ? base : tr.arms[t - 2];
                    const auto& now = tr.arms[t - 1];
                    std::size_t changed = 0;
                    for (std::size_t k = 0; k < K; ++k) {
                        if (now[k] == prev[k]) continue;
                        ++changed;
                        if (now[k].mu < s.ranges.mu_min || now[k].mu > s.ranges.mu_max) {
                            return fail(t, "reset mean outside range");
                        }
                        if (spec.family() == RewardFamily::gaussian &&
                            (now[k].sigma2 < s.ranges.sigma2_min || now[k].sigma2 > s.ranges.sigma2_max)) {
                            return fail(t, "reset variance outside range");
                        }
                    }
                    const std::size_t expected = t % s.interval == 0 ? s.reset_count : 0;
                    if (changed != expected) {
                        return fail(t, std::to_string(changed) + " arms changed, expected " +
                                           std::to_string(expected));
                    }
                }
                return {};
            },
            [&](const Periodic& s) -> std::string {
                const std::size_t P = s.period();
                for (std::size_t t = 1; t + P <= T; ++t) {
                    if (tr.arms[t - 1 + P] != tr.arms[t - 1]) return fail(t, "D(t + P) != D(t)");
                }
                for (std::size_t t = 1; t <= std::min(T, P); ++t) {
                    std::size_t pos = t - 1;
                    for (const PeriodicPhase& ph : s.phases) {
                        if (pos < ph.length) {
                            if (tr.arms[t - 1] != ph.arms) return fail(t, "wrong phase");
                            break;
                        }
                        pos -= ph.length;
                    }
                }
                return {};
            },
            [&](const Blips& s) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    const bool in = t >= s.start && t < s.start + s.duration;
                    if (tr.arms[t - 1] != (in ? s.blip : base)) {
                        return fail(t, in ? "blip law missing" : "did not revert outside the blip");
                    }
                }
                return {};
            },
            [&](const AddRemove& s) -> std::string {
                for (std::size_t t = 1; t <= T; ++t) {
                    ArmMask expect(K, 1);
                    expect[s.added_arm] = t >= s.t_add ? 1 : 0;
                    if (t >= s.t_remove) expect[s.removed_arm] = 0;
                    if (tr.active[t - 1] != expect) return fail(t, "active set off K0 + {k'} - {k''}");
                    if (tr.arms[t - 1] != base) return fail(t, "laws changed");
                }
                return {};
            },
        },
        spec.scenario);
}

inline std::string check_trajectory(const EnvironmentSpec& spec, std::uint64_t seed) {
    return check_trajectory(spec, seed, record_trajectory(spec, seed));
}

/// Online oracle answers against a brute-force argmax over the trajectory.
inline std::string check_oracle(const EnvironmentSpec& spec, std::uint64_t seed) {
    const Trajectory tr = record_trajectory(spec, seed);
    EnvironmentState env = initial_state(spec, seed);
    for (std::size_t t = 1; t <= spec.horizon; ++t) {
        if (t > 1) advance(env, spec, t, seed);
        std::size_t best = spec.arm_slots();
        for (std::size_t k = 0; k < spec.arm_slots(); ++k) {
            if (tr.active[t - 1][k] &&
                (best == spec.arm_slots() || tr.arms[t - 1][k].mu > tr.arms[t - 1][best].mu)) {
                best = k;
            }
        }
        const OracleBest online = oracle_best(env);
        if (online.arm != best || online.mean != tr.arms[t - 1][best].mu) {
            return spec.name + ": oracle mismatch at t=" + std::to_string(t);
        }
    }
    return {};
}

}  // namespace raven::testing
