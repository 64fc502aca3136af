#include "raven/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>

#include "raven/error.hpp"

namespace raven {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "raven_ucb", "ucb1",  "ucb_v", "epsilon_greedy", "thompson_beta", "thompson_gaussian",
    "sw_ucb",    "d_ucb", "fdsw_ts_min", "oracle",
};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

double sample_gamma(SplitMix64& rng, double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(rng);
}

double sample_beta(SplitMix64& rng, double a, double b) {
    const double x = sample_gamma(rng, a);
    const double y = sample_gamma(rng, b);
    return x / (x + y);
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string_view to_string(PolicyKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) {
            return static_cast<PolicyKind>(i);
        }
    }
    return std::nullopt;
}

PolicyParams default_params(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::raven_ucb: return RavenConfig{};
        case PolicyKind::ucb1: return Ucb1Params{};
        case PolicyKind::ucb_v: return UcbVParams{};
        case PolicyKind::epsilon_greedy: return EpsilonGreedyParams{};
        case PolicyKind::thompson_beta: return ThompsonBetaParams{};
        case PolicyKind::thompson_gaussian: return ThompsonGaussianParams{};
        case PolicyKind::sw_ucb: return SlidingWindowParams{};
        case PolicyKind::d_ucb: return DiscountParams{};
        case PolicyKind::fdsw_ts_min: return FdswParams{};
        case PolicyKind::oracle: return OracleParams{};
    }
    throw ConfigError("kind", "unknown policy kind");
}

void RavenConfig::validate() const {
    if (!finite_positive(alpha0)) {
        throw ConfigError("alpha0", "must be > 0");
    }
    if (!std::isfinite(beta0) || beta0 < 0.0) {
        throw ConfigError("beta0", "must be >= 0");
    }
    if (!finite_positive(epsilon) || epsilon > 0.5) {
        throw ConfigError("epsilon", "must lie in (0, 0.5]");
    }
}

PolicySpec::PolicySpec(PolicyParams p, std::string label)
    : params(std::move(p)), name(std::move(label)) {
    if (name.empty()) {
        name = std::string(to_string(kind()));
    }
}

void PolicySpec::validate() const {
    if (name.empty()) {
        throw ConfigError("name", "policy name must not be empty");
    }
    std::visit(Overloaded{
                   [](const RavenConfig& c) { c.validate(); },
                   [](const UcbVParams& p) {
                       if (p.range_bound && !finite_positive(*p.range_bound)) {
                           throw ConfigError("range_bound", "must be > 0");
                       }
                   },
                   [](const EpsilonGreedyParams& p) {
                       if (!std::isfinite(p.epsilon) || p.epsilon < 0.0 || p.epsilon > 1.0) {
                           throw ConfigError("epsilon", "must lie in [0, 1]");
                       }
                   },
                   [](const ThompsonGaussianParams& p) {
                       if (!std::isfinite(p.prior_mean)) {
                           throw ConfigError("prior_mean", "must be finite");
                       }
                       if (!finite_positive(p.prior_var)) {
                           throw ConfigError("prior_var", "must be > 0");
                       }
                       if (!finite_positive(p.obs_var)) {
                           throw ConfigError("obs_var", "must be > 0");
                       }
                   },
                   [](const SlidingWindowParams& p) {
                       if (p.window == 0) {
                           throw ConfigError("window", "must be >= 1");
                       }
                   },
                   [](const DiscountParams& p) {
                       if (!finite_positive(p.gamma) || p.gamma > 1.0) {
                           throw ConfigError("gamma", "must lie in (0, 1]");
                       }
                   },
                   [](const FdswParams& p) {
                       if (!finite_positive(p.gamma) || p.gamma > 1.0) {
                           throw ConfigError("gamma", "must lie in (0, 1]");
                       }
                       if (p.window == 0) {
                           throw ConfigError("window", "must be >= 1");
                       }
                   },
                   [](const auto&) {},
               },
               params);
}

// ---------------------------------------------------------------------------

double raven_alpha(std::size_t t, const RavenConfig& cfg) {
    if (t < 1) {
        throw InvalidStep("step must be >= 1");
    }
    const double denom = std::log(static_cast<double>(t) + cfg.epsilon);
    return cfg.alpha0 / std::max(denom, kDecayFloor);
}

double raven_score(std::size_t t, const StreamingStats& stats, const RavenConfig& cfg) {
    const double alpha_t = raven_alpha(t, cfg);
    const double n1 = static_cast<double>(stats.count()) + 1.0;
    const double explore = alpha_t * std::sqrt(std::log(static_cast<double>(t) + 1.0) / n1);
    const double spread = cfg.beta0 * std::sqrt(stats.variance() / n1 + cfg.epsilon);
    return stats.mean() + explore + spread;
}

double ucb1_score(const StreamingStats& stats, std::size_t t) {
    if (stats.count() == 0) {
        throw InvalidArm("ucb1 index needs at least one observation");
    }
    return stats.mean() +
           std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(stats.count()));
}

double ucbv_score(const StreamingStats& stats, std::size_t t, double range_bound) {
    if (stats.count() == 0) {
        throw InvalidArm("ucb_v index needs at least one observation");
    }
    const double n = static_cast<double>(stats.count());
    const double log_t = std::log(static_cast<double>(t));
    return stats.mean() + std::sqrt(2.0 * stats.variance() * log_t / n) +
           3.0 * range_bound * log_t / n;
}

std::size_t argmax_active(std::span<const double> scores, std::span<const std::uint8_t> active) {
    std::size_t best = scores.size();
    for (std::size_t k = 0; k < scores.size() && k < active.size(); ++k) {
        if (active[k] && (best == scores.size() || scores[k] > scores[best])) {
            best = k;
        }
    }
    if (best == scores.size()) {
        throw InvalidArm("no active arm to select");
    }
    return best;
}

// ---------------------------------------------------------------------------

Policy::Policy(std::size_t arm_slots) : counts_(arm_slots, 0), active_(arm_slots, 1) {}

std::size_t Policy::select(const SelectContext& ctx) {
    if (ctx.active.size() != counts_.size()) {
        throw InvalidArm("active mask has " + std::to_string(ctx.active.size()) +
                         " entries, policy tracks " + std::to_string(counts_.size()));
    }
    std::copy(ctx.active.begin(), ctx.active.end(), active_.begin());
    bool any = false;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        if (!active_[k]) {
            continue;
        }
        any = true;
        if (counts_[k] == 0 && tries_unseen_arms()) {
            return k;
        }
    }
    if (!any) {
        throw InvalidArm("no active arm to select");
    }
    return choose(ctx);
}

void Policy::observe(std::size_t arm, double reward) {
    if (arm >= counts_.size() || !active_[arm]) {
        throw InvalidArm("arm " + std::to_string(arm) + " is not active");
    }
    if (!std::isfinite(reward)) {
        throw InvalidObservation("non-finite reward for arm " + std::to_string(arm));
    }
    record(arm, reward);
    ++counts_[arm];
    ++step_;
}

std::size_t IndexPolicy::choose(const SelectContext& ctx) {
    scratch_.assign(arm_slots(), 0.0);
    for (std::size_t k = 0; k < scratch_.size(); ++k) {
        if (ctx.active[k]) {
            scratch_[k] = index(k);
        }
    }
    return argmax_active(scratch_, ctx.active);
}

RavenUcbPolicy::RavenUcbPolicy(std::size_t arm_slots, RavenConfig cfg)
    : StatsPolicy(arm_slots), cfg_(cfg) {
    cfg_.validate();
}

double RavenUcbPolicy::index(std::size_t arm) const { return raven_score(step(), stats(arm), cfg_); }

double Ucb1Policy::index(std::size_t arm) const { return ucb1_score(stats(arm), step()); }

UcbVPolicy::UcbVPolicy(std::size_t arm_slots, double range_bound)
    : StatsPolicy(arm_slots), range_bound_(range_bound) {}

double UcbVPolicy::index(std::size_t arm) const {
    return ucbv_score(stats(arm), step(), range_bound_);
}

// ---------------------------------------------------------------------------

EpsilonGreedyPolicy::EpsilonGreedyPolicy(std::size_t arm_slots, EpsilonGreedyParams params,
                                         std::uint64_t seed)
    : Policy(arm_slots), epsilon_(params.epsilon), rng_(seed), stats_(arm_slots) {}

std::size_t EpsilonGreedyPolicy::choose(const SelectContext& ctx) {
    if (uniform01(rng_) < epsilon_) {
        std::vector<std::size_t> candidates;
        for (std::size_t k = 0; k < ctx.active.size(); ++k) {
            if (ctx.active[k]) {
                candidates.push_back(k);
            }
        }
        return candidates[uniform_index(rng_, candidates.size())];
    }
    scratch_.resize(stats_.size());
    for (std::size_t k = 0; k < stats_.size(); ++k) {
        scratch_[k] = stats_[k].mean();
    }
    return argmax_active(scratch_, ctx.active);
}

ThompsonBetaPolicy::ThompsonBetaPolicy(std::size_t arm_slots, std::uint64_t seed)
    : Policy(arm_slots), rng_(seed), post_(arm_slots) {}

std::size_t ThompsonBetaPolicy::choose(const SelectContext& ctx) {
    scratch_.assign(post_.size(), 0.0);
    for (std::size_t k = 0; k < post_.size(); ++k) {
        if (ctx.active[k]) {
            scratch_[k] = sample_beta(rng_, post_[k].a, post_[k].b);
        }
    }
    return argmax_active(scratch_, ctx.active);
}

void ThompsonBetaPolicy::record(std::size_t arm, double reward) {
    const double r = clip01(reward);
    post_[arm].a += r;
    post_[arm].b += 1.0 - r;
}

ThompsonGaussianPolicy::ThompsonGaussianPolicy(std::size_t arm_slots,
                                               ThompsonGaussianParams params, std::uint64_t seed)
    : Policy(arm_slots), params_(params), rng_(seed), sums_(arm_slots, 0.0) {}

ThompsonGaussianPolicy::Posterior ThompsonGaussianPolicy::posterior(std::size_t arm) const {
    const double precision =
        1.0 / params_.prior_var + static_cast<double>(pulls(arm)) / params_.obs_var;
    Posterior p;
    p.var = 1.0 / precision;
    p.mean = p.var * (params_.prior_mean / params_.prior_var + sums_.at(arm) / params_.obs_var);
    return p;
}

std::size_t ThompsonGaussianPolicy::choose(const SelectContext& ctx) {
    scratch_.assign(sums_.size(), 0.0);
    for (std::size_t k = 0; k < sums_.size(); ++k) {
        if (ctx.active[k]) {
            const Posterior p = posterior(k);
            scratch_[k] = p.mean + std::sqrt(p.var) * standard_normal(rng_);
        }
    }
    return argmax_active(scratch_, ctx.active);
}

void ThompsonGaussianPolicy::record(std::size_t arm, double reward) { sums_[arm] += reward; }

// ---------------------------------------------------------------------------

RewardWindow::RewardWindow(std::size_t capacity) : buf_(std::max<std::size_t>(capacity, 1), 0.0) {}

void RewardWindow::push(double x) {
    if (size_ == buf_.size()) {
        sum_ -= buf_[head_];
    } else {
        ++size_;
    }
    buf_[head_] = x;
    sum_ += x;
    head_ = (head_ + 1) % buf_.size();
    // Re-sum periodically so add/subtract round-off cannot accumulate.
    if (++since_resum_ >= buf_.size()) {
        since_resum_ = 0;
        sum_ = 0.0;
        for (double v : values()) {
            sum_ += v;
        }
    }
}

std::vector<double> RewardWindow::values() const {
    std::vector<double> out;
    out.reserve(size_);
    const std::size_t start = (head_ + buf_.size() - size_) % buf_.size();
    for (std::size_t i = 0; i < size_; ++i) {
        out.push_back(buf_[(start + i) % buf_.size()]);
    }
    return out;
}

SlidingWindowUcbPolicy::SlidingWindowUcbPolicy(std::size_t arm_slots, SlidingWindowParams params)
    : IndexPolicy(arm_slots), window_(params.window), windows_(arm_slots, RewardWindow(params.window)) {}

double SlidingWindowUcbPolicy::index(std::size_t arm) const {
    const RewardWindow& w = windows_[arm];
    const double horizon = static_cast<double>(std::min(step(), window_));
    return w.mean() + std::sqrt(2.0 * std::log(horizon) / static_cast<double>(w.size()));
}

DiscountedUcbPolicy::DiscountedUcbPolicy(std::size_t arm_slots, DiscountParams params)
    : IndexPolicy(arm_slots), gamma_(params.gamma), weights_(arm_slots, 0.0), means_(arm_slots, 0.0) {}

double DiscountedUcbPolicy::index(std::size_t arm) const {
    return means_[arm] + std::sqrt(2.0 * std::log(total_weight_ + 1.0) / weights_[arm]);
}

void DiscountedUcbPolicy::record(std::size_t arm, double reward) {
    if (gamma_ != 1.0) {
        for (double& w : weights_) {
            w *= gamma_;
        }
        total_weight_ *= gamma_;
    }
    weights_[arm] += 1.0;
    total_weight_ += 1.0;
    // Discounting scales sum and weight alike, so the mean only moves on a pull.
    means_[arm] += (reward - means_[arm]) / weights_[arm];
}

FdswTsMinPolicy::FdswTsMinPolicy(std::size_t arm_slots, FdswParams params, RewardFamily family,
                                 std::uint64_t seed)
    : Policy(arm_slots),
      params_(params),
      family_(family),
      rng_(seed),
      disc_sum_(arm_slots, 0.0),
      disc_weight_(arm_slots, 0.0),
      windows_(arm_slots, RewardWindow(params.window)) {}

double FdswTsMinPolicy::draw(double successes, double weight) {
    if (family_ == RewardFamily::bernoulli) {
        return sample_beta(rng_, 1.0 + std::max(successes, 0.0),
                           1.0 + std::max(weight - successes, 0.0));
    }
    const double precision = 1.0 + weight;
    return successes / precision + std::sqrt(1.0 / precision) * standard_normal(rng_);
}

std::size_t FdswTsMinPolicy::choose(const SelectContext& ctx) {
    scratch_.assign(disc_sum_.size(), 0.0);
    for (std::size_t k = 0; k < disc_sum_.size(); ++k) {
        if (ctx.active[k]) {
            const double discounted = draw(disc_sum_[k], disc_weight_[k]);
            const double windowed =
                draw(windows_[k].sum(), static_cast<double>(windows_[k].size()));
            scratch_[k] = std::min(discounted, windowed);
        }
    }
    return argmax_active(scratch_, ctx.active);
}

void FdswTsMinPolicy::record(std::size_t arm, double reward) {
    const double r = family_ == RewardFamily::bernoulli ? clip01(reward) : reward;
    for (std::size_t k = 0; k < disc_sum_.size(); ++k) {
        disc_sum_[k] *= params_.gamma;
        disc_weight_[k] *= params_.gamma;
    }
    disc_sum_[arm] += r;
    disc_weight_[arm] += 1.0;
    windows_[arm].push(r);
}

std::size_t OraclePolicy::choose(const SelectContext& ctx) {
    if (ctx.true_means.size() != ctx.active.size()) {
        throw InvalidArm("oracle policy needs the true means of every arm");
    }
    return argmax_active(ctx.true_means, ctx.active);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ArmSetInfo& arms,
                                    std::uint64_t seed) {
    spec.validate();
    const std::size_t k = arms.arm_slots;
    return std::visit(
        Overloaded{
            [&](const RavenConfig& c) -> std::unique_ptr<Policy> {
                return std::make_unique<RavenUcbPolicy>(k, c);
            },
            [&](const Ucb1Params&) -> std::unique_ptr<Policy> {
                return std::make_unique<Ucb1Policy>(k);
            },
            [&](const UcbVParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<UcbVPolicy>(k, p.range_bound.value_or(arms.reward_range));
            },
            [&](const EpsilonGreedyParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<EpsilonGreedyPolicy>(k, p, seed);
            },
            [&](const ThompsonBetaParams&) -> std::unique_ptr<Policy> {
                return std::make_unique<ThompsonBetaPolicy>(k, seed);
            },
            [&](const ThompsonGaussianParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<ThompsonGaussianPolicy>(k, p, seed);
            },
            [&](const SlidingWindowParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<SlidingWindowUcbPolicy>(k, p);
            },
            [&](const DiscountParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<DiscountedUcbPolicy>(k, p);
            },
            [&](const FdswParams& p) -> std::unique_ptr<Policy> {
                return std::make_unique<FdswTsMinPolicy>(k, p, arms.family, seed);
            },
            [&](const OracleParams&) -> std::unique_ptr<Policy> {
                return std::make_unique<OraclePolicy>(k);
            },
        },
        spec.params);
}

}  // namespace raven
