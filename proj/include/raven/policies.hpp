#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "raven/rng.hpp"
#include "raven/streaming_stats.hpp"
#include "raven/types.hpp"

namespace raven {

/// Hyperparameters of RAVEN-UCB.
struct RavenConfig {
    double alpha0 = 1.0;    ///< base exploration coefficient, > 0
    double beta0 = 1.0;     ///< weight of the variance bonus, >= 0
    double epsilon = 1e-3;  ///< decay offset and variance regularizer, in (0, 0.5]

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;

    friend bool operator==(const RavenConfig&, const RavenConfig&) = default;
};

struct Ucb1Params {
    friend bool operator==(const Ucb1Params&, const Ucb1Params&) = default;
};

struct UcbVParams {
    /// Reward range bound b. Taken from the environment when unset.
    std::optional<double> range_bound;
    friend bool operator==(const UcbVParams&, const UcbVParams&) = default;
};

struct EpsilonGreedyParams {
    double epsilon = 0.1;
    friend bool operator==(const EpsilonGreedyParams&, const EpsilonGreedyParams&) = default;
};

struct ThompsonBetaParams {
    friend bool operator==(const ThompsonBetaParams&, const ThompsonBetaParams&) = default;
};

/// Normal prior N(prior_mean, prior_var), known observation variance.
struct ThompsonGaussianParams {
    double prior_mean = 0.0;
    double prior_var = 1.0;
    double obs_var = 1.0;
    friend bool operator==(const ThompsonGaussianParams&,
                           const ThompsonGaussianParams&) = default;
};

struct SlidingWindowParams {
    std::size_t window = 100;
    friend bool operator==(const SlidingWindowParams&, const SlidingWindowParams&) = default;
};

struct DiscountParams {
    double gamma = 0.99;
    friend bool operator==(const DiscountParams&, const DiscountParams&) = default;
};

/// f-dsw Thompson sampling with min aggregation.
struct FdswParams {
    double gamma = 0.95;
    std::size_t window = 100;
    friend bool operator==(const FdswParams&, const FdswParams&) = default;
};

/// Evaluation-only policy that plays the true best arm.
struct OracleParams {
    friend bool operator==(const OracleParams&, const OracleParams&) = default;
};

enum class PolicyKind {
    raven_ucb,
    ucb1,
    ucb_v,
    epsilon_greedy,
    thompson_beta,
    thompson_gaussian,
    sw_ucb,
    d_ucb,
    fdsw_ts_min,
    oracle,
};

// Alternative order matches PolicyKind.
using PolicyParams =
    std::variant<RavenConfig, Ucb1Params, UcbVParams, EpsilonGreedyParams, ThompsonBetaParams,
                 ThompsonGaussianParams, SlidingWindowParams, DiscountParams, FdswParams,
                 OracleParams>;

[[nodiscard]] std::string_view to_string(PolicyKind kind);
[[nodiscard]] std::optional<PolicyKind> parse_policy_kind(std::string_view name);
[[nodiscard]] PolicyParams default_params(PolicyKind kind);

struct PolicySpec {
    PolicyParams params;
    std::string name;  ///< label in reports; defaults to the kind name

    PolicySpec() = default;
    explicit PolicySpec(PolicyParams p, std::string label = {});

    [[nodiscard]] PolicyKind kind() const noexcept {
        return static_cast<PolicyKind>(params.index());
    }
    void validate() const;

    friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// What a policy is allowed to know about the environment up front.
struct ArmSetInfo {
    std::size_t arm_slots = 0;  ///< total arms that may ever be active
    RewardFamily family = RewardFamily::bernoulli;
    double reward_range = 1.0;  ///< bound b used by UCB-V
};

/// Per-step inputs to selection. `true_means` is consumed only by the
/// evaluation oracle.
struct SelectContext {
    std::span<const std::uint8_t> active;
    std::span<const double> true_means;
};

// ---------------------------------------------------------------------------
// Index formulas. Logs are natural.

inline constexpr double kDecayFloor = 1e-6;

/// alpha_t = alpha0 / max(ln(t + epsilon), 1e-6). Throws InvalidStep for t < 1.
[[nodiscard]] double raven_alpha(std::size_t t, const RavenConfig& cfg);

/// M + alpha_t sqrt(ln(t+1)/(N+1)) + beta0 sqrt(S^2/(N+1) + epsilon).
[[nodiscard]] double raven_score(std::size_t t, const StreamingStats& stats,
                                 const RavenConfig& cfg);

/// M + sqrt(2 ln t / N). Throws InvalidArm when the arm has no observations.
[[nodiscard]] double ucb1_score(const StreamingStats& stats, std::size_t t);

/// M + sqrt(2 S^2 ln t / N) + 3 b ln t / N.
[[nodiscard]] double ucbv_score(const StreamingStats& stats, std::size_t t,
                                double range_bound);

/// Lowest-index argmax of `scores` over active arms. Throws InvalidArm when
/// no arm is active.
[[nodiscard]] std::size_t argmax_active(std::span<const double> scores,
                                        std::span<const std::uint8_t> active);

// ---------------------------------------------------------------------------

/// Mutable per-run state of a bandit policy behind a select/observe interface.
///
/// select() first returns the lowest-index active arm that has never been
/// observed (round-robin initialization that also covers arms added mid-run),
/// then defers to the policy's own rule.
class Policy {
public:
    explicit Policy(std::size_t arm_slots);
    virtual ~Policy() = default;

    Policy(const Policy&) = delete;
    Policy& operator=(const Policy&) = delete;

    std::size_t select(const SelectContext& ctx);

    /// Throws InvalidArm unless `arm` was active in the last select().
    void observe(std::size_t arm, double reward);

    /// Current step t = observe() calls + 1.
    [[nodiscard]] std::size_t step() const noexcept { return step_; }
    [[nodiscard]] std::size_t arm_slots() const noexcept { return counts_.size(); }
    [[nodiscard]] std::size_t pulls(std::size_t arm) const { return counts_.at(arm); }

protected:
    virtual std::size_t choose(const SelectContext& ctx) = 0;
    virtual void record(std::size_t arm, double reward) = 0;
    /// Whether select() plays never-observed arms before choose().
    [[nodiscard]] virtual bool tries_unseen_arms() const noexcept { return true; }

private:
    std::vector<std::size_t> counts_;
    std::vector<std::uint8_t> active_;
    std::size_t step_ = 1;
};

/// Policies whose choice is the argmax of a per-arm index.
class IndexPolicy : public Policy {
public:
    using Policy::Policy;

    [[nodiscard]] virtual double index(std::size_t arm) const = 0;

protected:
    std::size_t choose(const SelectContext& ctx) override;

private:
    std::vector<double> scratch_;
};

/// Index policy over per-arm StreamingStats.
class StatsPolicy : public IndexPolicy {
public:
    explicit StatsPolicy(std::size_t arm_slots) : IndexPolicy(arm_slots), stats_(arm_slots) {}

    [[nodiscard]] const StreamingStats& stats(std::size_t arm) const { return stats_.at(arm); }

protected:
    void record(std::size_t arm, double reward) override { stats_[arm].update(reward); }

private:
    std::vector<StreamingStats> stats_;
};

class RavenUcbPolicy final : public StatsPolicy {
public:
    RavenUcbPolicy(std::size_t arm_slots, RavenConfig cfg);
    [[nodiscard]] double index(std::size_t arm) const override;
    [[nodiscard]] const RavenConfig& config() const noexcept { return cfg_; }

private:
    RavenConfig cfg_;
};

class Ucb1Policy final : public StatsPolicy {
public:
    using StatsPolicy::StatsPolicy;
    [[nodiscard]] double index(std::size_t arm) const override;
};

class UcbVPolicy final : public StatsPolicy {
public:
    UcbVPolicy(std::size_t arm_slots, double range_bound);
    [[nodiscard]] double index(std::size_t arm) const override;

private:
    double range_bound_;
};

class EpsilonGreedyPolicy final : public Policy {
public:
    EpsilonGreedyPolicy(std::size_t arm_slots, EpsilonGreedyParams params, std::uint64_t seed);
    [[nodiscard]] const StreamingStats& stats(std::size_t arm) const { return stats_.at(arm); }

protected:
    std::size_t choose(const SelectContext& ctx) override;
    void record(std::size_t arm, double reward) override { stats_[arm].update(reward); }

private:
    double epsilon_;
    SplitMix64 rng_;
    std::vector<StreamingStats> stats_;
    std::vector<double> scratch_;
};

class ThompsonBetaPolicy final : public Policy {
public:
    ThompsonBetaPolicy(std::size_t arm_slots, std::uint64_t seed);

    struct Posterior {
        double a = 1.0;
        double b = 1.0;
    };
    [[nodiscard]] Posterior posterior(std::size_t arm) const { return post_.at(arm); }

protected:
    std::size_t choose(const SelectContext& ctx) override;
    /// Rewards are clipped to [0, 1]; a += r, b += 1 - r.
    void record(std::size_t arm, double reward) override;

private:
    SplitMix64 rng_;
    std::vector<Posterior> post_;
    std::vector<double> scratch_;
};

class ThompsonGaussianPolicy final : public Policy {
public:
    ThompsonGaussianPolicy(std::size_t arm_slots, ThompsonGaussianParams params,
                           std::uint64_t seed);

    struct Posterior {
        double mean = 0.0;
        double var = 1.0;
    };
    [[nodiscard]] Posterior posterior(std::size_t arm) const;

protected:
    std::size_t choose(const SelectContext& ctx) override;
    void record(std::size_t arm, double reward) override;

private:
    ThompsonGaussianParams params_;
    SplitMix64 rng_;
    std::vector<double> sums_;
    std::vector<double> scratch_;
};

/// Fixed-capacity FIFO of the most recent rewards with a running sum.
class RewardWindow {
public:
    explicit RewardWindow(std::size_t capacity = 1);

    void push(double x);
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t capacity() const noexcept { return buf_.size(); }
    [[nodiscard]] double sum() const noexcept { return sum_; }
    [[nodiscard]] double mean() const noexcept {
        return size_ == 0 ? 0.0 : sum_ / static_cast<double>(size_);
    }
    /// Contents, oldest first.
    [[nodiscard]] std::vector<double> values() const;

private:
    std::vector<double> buf_;
    std::size_t head_ = 0;  // next write position
    std::size_t size_ = 0;
    std::size_t since_resum_ = 0;
    double sum_ = 0.0;
};

/// UCB over a per-arm window of the last W rewards:
/// windowed mean + sqrt(2 ln(min(t, W)) / n_window).
class SlidingWindowUcbPolicy final : public IndexPolicy {
public:
    SlidingWindowUcbPolicy(std::size_t arm_slots, SlidingWindowParams params);
    [[nodiscard]] double index(std::size_t arm) const override;
    [[nodiscard]] const RewardWindow& window(std::size_t arm) const { return windows_.at(arm); }

protected:
    void record(std::size_t arm, double reward) override { windows_[arm].push(reward); }

private:
    std::size_t window_;
    std::vector<RewardWindow> windows_;
};

/// Discounted UCB: every step all discounted counts shrink by gamma, then the
/// played arm gets weight 1. Index: discounted mean + sqrt(2 ln(n + 1) / N_k)
/// with n the total discounted count. With gamma = 1 this reproduces UCB1.
class DiscountedUcbPolicy final : public IndexPolicy {
public:
    DiscountedUcbPolicy(std::size_t arm_slots, DiscountParams params);
    [[nodiscard]] double index(std::size_t arm) const override;

protected:
    void record(std::size_t arm, double reward) override;

private:
    double gamma_;
    std::vector<double> weights_;
    std::vector<double> means_;
    double total_weight_ = 0.0;
};

/// f-dsw TS with min aggregation: per arm, sample a discounted-history
/// posterior and a sliding-window posterior and keep the smaller draw.
/// Bernoulli environments use Beta posteriors on rewards clipped to [0, 1];
/// Gaussian environments use N(0, 1)-prior posteriors with unit noise.
class FdswTsMinPolicy final : public Policy {
public:
    FdswTsMinPolicy(std::size_t arm_slots, FdswParams params, RewardFamily family,
                    std::uint64_t seed);

protected:
    std::size_t choose(const SelectContext& ctx) override;
    void record(std::size_t arm, double reward) override;

private:
    [[nodiscard]] double draw(double successes, double weight);

    FdswParams params_;
    RewardFamily family_;
    SplitMix64 rng_;
    std::vector<double> disc_sum_;
    std::vector<double> disc_weight_;
    std::vector<RewardWindow> windows_;
    std::vector<double> scratch_;
};

class OraclePolicy final : public Policy {
public:
    using Policy::Policy;

protected:
    std::size_t choose(const SelectContext& ctx) override;
    void record(std::size_t, double) override {}
    [[nodiscard]] bool tries_unseen_arms() const noexcept override { return false; }
};

/// Build a fresh policy for one trial. `seed` feeds the policy's own stream.
[[nodiscard]] std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ArmSetInfo& arms,
                                                  std::uint64_t seed);

}  // namespace raven
