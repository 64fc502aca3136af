#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "raven/environments.hpp"
#include "raven/error.hpp"
#include "taxonomy.hpp"

using namespace raven;

namespace {

EnvironmentSpec gaussian_spec(std::vector<double> means, double sigma2, std::size_t horizon,
                              ScenarioParams scenario = Stationary{}) {
    EnvironmentSpec spec;
    spec.name = "test";
    spec.horizon = horizon;
    for (double m : means) spec.arms.push_back({RewardFamily::gaussian, m, sigma2});
    spec.scenario = std::move(scenario);
    return spec;
}

EnvironmentState at_step(const EnvironmentSpec& spec, std::size_t t, std::uint64_t seed = 1) {
    EnvironmentState env = initial_state(spec, seed);
    for (std::size_t s = 2; s <= t; ++s) advance(env, spec, s, seed);
    return env;
}

}  // namespace

TEST_CASE("stationary advance is the identity") {
    const EnvironmentSpec spec = gaussian_spec({0.2, 0.4}, 0.1, 300);
    EnvironmentState env = initial_state(spec, 3);
    for (std::size_t t = 2; t <= 300; ++t) {
        advance(env, spec, t, 3);
        REQUIRE(env.arms == spec.arms);
        REQUIRE(env.t == t);
    }
}

TEST_CASE("advance enforces step order and horizon") {
    const EnvironmentSpec spec = gaussian_spec({0.2}, 0.1, 3);
    EnvironmentState env = initial_state(spec, 3);
    CHECK_THROWS_AS(advance(env, spec, 3, 3), InvalidStep);
    advance(env, spec, 2, 3);
    advance(env, spec, 3, 3);
    CHECK_THROWS_AS(advance(env, spec, 4, 3), InvalidStep);
}

TEST_CASE("incremental drift closed form") {
    const EnvironmentSpec spec = gaussian_spec({0.5}, 0.01, 200, IncrementalDrift{{0.001}});
    CHECK(at_step(spec, 100).arms[0].mu == doctest::Approx(0.6));
    CHECK(at_step(spec, 100).arms[0].sigma2 == 0.01);
}

TEST_CASE("oracle switches when a drifting arm overtakes") {
    // Arm 0 is B (constant 0.55); arm 1 is A (0.5 + 0.001 t).
    const EnvironmentSpec spec =
        gaussian_spec({0.55, 0.5}, 0.01, 100, IncrementalDrift{{0.0, 0.001}});
    EnvironmentState env = initial_state(spec, 1);
    for (std::size_t t = 1; t <= 100; ++t) {
        if (t > 1) advance(env, spec, t, 1);
        const std::size_t expected = t >= 51 ? 1 : 0;
        REQUIRE(oracle_best(env).arm == expected);
    }
}

TEST_CASE("oracle_best argmax and ties") {
    const EnvironmentSpec spec = gaussian_spec({0.3, 0.8, 0.5}, 0.0, 10);
    const OracleBest b = oracle_best(initial_state(spec, 1));
    CHECK(b.arm == 1);
    CHECK(b.mean == 0.8);
    CHECK(oracle_best(initial_state(gaussian_spec({0.4, 0.4, 0.4}, 0.0, 10), 1)).arm == 0);
}

TEST_CASE("variance drift closed form") {
    const EnvironmentSpec spec = gaussian_spec({0.5, 0.6}, 0.01, 1000, VarianceDrift{{1e-5, 2e-5}});
    const EnvironmentState env = at_step(spec, 500);
    CHECK(env.arms[0].sigma2 == doctest::Approx(0.01 + 0.005));
    CHECK(env.arms[1].sigma2 == doctest::Approx(0.01 + 0.01));
    CHECK(env.arms[1].mu == 0.6);
}

TEST_CASE("logistics reset cardinality at K=100, R=5000") {
    const EnvironmentSpec spec = make_logistics_env(LogisticsParams::table2());
    EnvironmentState env = at_step(spec, 4999, 17);
    const std::vector<ArmDistribution> before = env.arms;
    advance(env, spec, 5000, 17);
    std::size_t changed = 0;
    for (std::size_t k = 0; k < 100; ++k) changed += env.arms[k] == before[k] ? 0 : 1;
    CHECK(changed == 33);
    advance(env, spec, 5001, 17);
    std::size_t changed_after = 0;
    for (std::size_t k = 0; k < 100; ++k) changed_after += env.arms[k] == before[k] ? 0 : 1;
    CHECK(changed_after == 33);
}

TEST_CASE("logistics parameter records") {
    const LogisticsParams t2 = LogisticsParams::table2();
    CHECK(t2.k == 100);
    CHECK(t2.mu_min == 0.3);
    CHECK(t2.mu_max == 0.8);
    CHECK(t2.sigma2_min == 0.01);
    CHECK(t2.sigma2_max == 0.09);
    CHECK(t2.reset_interval == 5000);
    CHECK(t2.horizon == 50000);
    const LogisticsParams d = LogisticsParams::desk();
    CHECK(d.k == 20);
    CHECK(d.reset_interval == 2000);
    CHECK(d.horizon == 10000);

    const EnvironmentSpec spec = make_logistics_env(t2);
    CHECK(spec.kind() == Scenario::localized_jump);
    CHECK(spec.arm_slots() == 100);
    CHECK(spec.horizon == 50000);
    CHECK(std::get<LocalizedJump>(spec.scenario).reset_count == 33);

    LogisticsParams bad = d;
    bad.mu_min = 0.9;
    CHECK_THROWS_AS((void)make_logistics_env(bad), ConfigError);
}

TEST_CASE("reset interval beyond the horizon never resets") {
    LogisticsParams p = LogisticsParams::desk();
    p.horizon = 500;
    p.reset_interval = 1000;
    const EnvironmentSpec spec = make_logistics_env(p);
    const Trajectory tr = record_trajectory(spec, 4);
    for (const auto& laws : tr.arms) REQUIRE(laws == tr.arms.front());
}

TEST_CASE("logistics initial laws are drawn per trial within range") {
    const EnvironmentSpec spec = make_logistics_env(LogisticsParams::desk());
    const EnvironmentState a = initial_state(spec, 1);
    const EnvironmentState b = initial_state(spec, 2);
    CHECK(a.arms != b.arms);
    for (const ArmDistribution& d : a.arms) {
        CHECK(d.mu >= 0.3);
        CHECK(d.mu <= 0.8);
        CHECK(d.sigma2 >= 0.01);
        CHECK(d.sigma2 <= 0.09);
    }
}

TEST_CASE("sample_reward degenerate laws") {
    EnvironmentSpec b;
    b.horizon = 10;
    b.arms = {{RewardFamily::bernoulli, 1.0, 0.0}, {RewardFamily::bernoulli, 0.0, 0.0}};
    const EnvironmentState env = initial_state(b, 1);
    for (std::uint64_t s = 0; s < 200; ++s) {
        REQUIRE(sample_reward(env, 0, s) == 1.0);
        REQUIRE(sample_reward(env, 1, s) == 0.0);
    }
    const EnvironmentState g = initial_state(gaussian_spec({0.5}, 0.0, 10), 1);
    for (std::uint64_t s = 0; s < 200; ++s) REQUIRE(sample_reward(g, 0, s) == 0.5);
}

TEST_CASE("bernoulli empirical mean concentrates") {
    EnvironmentSpec spec;
    spec.horizon = 10000;
    spec.arms = {{RewardFamily::bernoulli, 0.8, 0.0}};
    EnvironmentState env = initial_state(spec, 5);
    double sum = 0.0;
    for (std::size_t t = 1; t <= 10000; ++t) {
        if (t > 1) advance(env, spec, t, 5);
        sum += sample_reward(env, 0, 5);
    }
    CHECK(sum / 10000 >= 0.78);
    CHECK(sum / 10000 <= 0.82);
}

TEST_CASE("gaussian reward moments") {
    const EnvironmentSpec spec = gaussian_spec({0.3}, 0.04, 20000);
    EnvironmentState env = initial_state(spec, 8);
    double s = 0.0, s2 = 0.0;
    for (std::size_t t = 1; t <= 20000; ++t) {
        if (t > 1) advance(env, spec, t, 8);
        const double r = sample_reward(env, 0, 8);
        s += r;
        s2 += r * r;
    }
    const double mean = s / 20000;
    CHECK(mean == doctest::Approx(0.3).epsilon(0.02));
    CHECK(s2 / 20000 - mean * mean == doctest::Approx(0.04).epsilon(0.05));
}

TEST_CASE("rewards are shared per (trial, step, arm)") {
    const EnvironmentSpec spec = gaussian_spec({0.1, 0.2, 0.3}, 0.5, 10);
    const EnvironmentState env = initial_state(spec, 9);
    CHECK(sample_reward(env, 1, 9) == sample_reward(env, 1, 9));
    CHECK(sample_reward(env, 1, 9) != sample_reward(env, 2, 9));
    CHECK(sample_reward(env, 1, 9) != sample_reward(env, 1, 10));
}

TEST_CASE("sampling an inactive arm is rejected") {
    const EnvironmentSpec spec = make_preset("add-remove", {}, 1);
    const EnvironmentState env = initial_state(spec, 1);
    const auto& s = std::get<AddRemove>(spec.scenario);
    CHECK_THROWS_AS((void)sample_reward(env, s.added_arm, 1), InvalidArm);
    CHECK_THROWS_AS((void)sample_reward(env, 99, 1), InvalidArm);
}

TEST_CASE("bernoulli experiment") {
    const EnvironmentSpec spec = make_preset("bernoulli-s4.1", {}, 123);
    CHECK(spec.arm_slots() == 10);
    CHECK(spec.horizon == 5000);
    CHECK(spec.family() == RewardFamily::bernoulli);
    CHECK(spec.kind() == Scenario::stationary);
    double vmax = 0.0;
    for (const ArmDistribution& d : spec.arms) {
        CHECK(d.mu >= 0.8);
        CHECK(d.mu <= 0.95);
        CHECK(d.variance() >= 0.0475 - 1e-12);
        CHECK(d.variance() <= 0.16 + 1e-12);
        vmax = std::max(vmax, d.variance());
    }
    CHECK(vmax <= 0.16);
    CHECK(make_preset("bernoulli-s4.1", {}, 123).arms == spec.arms);
    CHECK(make_preset("bernoulli-s4.1", {}, 124).arms != spec.arms);
}

TEST_CASE("bernoulli variance bounds follow from the mean range") {
    const ArmDistribution lo{RewardFamily::bernoulli, 0.95, 0.0};
    const ArmDistribution hi{RewardFamily::bernoulli, 0.8, 0.0};
    CHECK(lo.variance() == doctest::Approx(0.0475));
    CHECK(hi.variance() == doctest::Approx(0.16));
}

TEST_CASE("every preset conforms to its scenario equation") {
    for (std::string_view name : preset_names()) {
        CAPTURE(name);
        PresetOptions o;
        o.horizon = 6000;
        if (name == "logistics-table2") o.k = 30;
        const EnvironmentSpec spec = make_preset(name, o, 31);
        for (std::uint64_t seed : {1ULL, 2ULL}) {
            CHECK(testing::check_trajectory(spec, seed) == "");
            CHECK(testing::check_oracle(spec, seed) == "");
        }
    }
}

TEST_CASE("conformance checker catches violations") {
    const EnvironmentSpec periodic = make_preset("periodic", {.horizon = 3000}, 1);
    Trajectory tr = record_trajectory(periodic, 1);
    tr.arms[2500][0].mu += 1e-9;
    CHECK(testing::check_trajectory(periodic, 1, tr) != "");

    const EnvironmentSpec blips = make_preset("blips", {.horizon = 2000}, 1);
    tr = record_trajectory(blips, 1);
    tr.arms.back() = std::get<Blips>(blips.scenario).blip;
    CHECK(testing::check_trajectory(blips, 1, tr) != "");

    const EnvironmentSpec desk = make_preset("logistics-desk", {.horizon = 4000}, 1);
    tr = record_trajectory(desk, 1);
    tr.arms[1999] = tr.arms[1998];
    CHECK(testing::check_trajectory(desk, 1, tr) != "");
}

TEST_CASE("preset taxonomy") {
    const std::vector<std::pair<std::string_view, Scenario>> expect = {
        {"bernoulli-s4.1", Scenario::stationary},   {"logistics-table2", Scenario::localized_jump},
        {"logistics-desk", Scenario::localized_jump}, {"incremental", Scenario::incremental_drift},
        {"variance-drift", Scenario::variance_drift}, {"gradual", Scenario::gradual_drift},
        {"periodic", Scenario::periodic},           {"blips", Scenario::blips},
        {"add-remove", Scenario::add_remove_arm},
    };
    CHECK(preset_names().size() == expect.size());
    for (const auto& [name, kind] : expect) {
        CHECK(make_preset(name, {}, 1).kind() == kind);
    }
}

TEST_CASE("preset defaults and overrides") {
    CHECK(preset_defaults("logistics-table2").horizon == 50000);
    CHECK(preset_defaults("logistics-table2").trials == 50);
    CHECK(preset_defaults("bernoulli-s4.1").horizon == 5000);
    CHECK_THROWS_AS((void)preset_defaults("nope"), ConfigError);
    CHECK_THROWS_AS((void)make_preset("nope", {}, 1), ConfigError);

    const EnvironmentSpec desk = make_preset("logistics-desk", {.k = 9}, 1);
    CHECK(desk.arm_slots() == 9);
    CHECK(std::get<LocalizedJump>(desk.scenario).reset_count == 3);

    try {
        (void)make_preset("bernoulli-s4.1", {.sigma2 = 0.1}, 1);
        FAIL("override accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "sigma2");
    }
    const PresetOptions r = resolve_preset_options("blips", {});
    CHECK(r.blip_delta == -0.3);
    CHECK(r.blip_fraction == 0.05);
    CHECK(r.k == 5);
    CHECK_FALSE(r.period.has_value());
}

TEST_CASE("environment spec validation") {
    EnvironmentSpec spec = gaussian_spec({0.5, 0.6}, 0.01, 100, GradualDrift{80, 50, {}});
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.scenario = Blips{200, 5, spec.arms};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.scenario = IncrementalDrift{{0.1}};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.arms[0].sigma2 = -1.0;
    spec.scenario = Stationary{};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    EnvironmentSpec b;
    b.horizon = 10;
    b.arms = {{RewardFamily::bernoulli, 1.5, 0.0}};
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("trajectories do not depend on the playing policy") {
    const EnvironmentSpec spec = make_preset("gradual", {.horizon = 3000}, 1);
    const Trajectory a = record_trajectory(spec, 77);
    // Interleave reward draws between steps; the schedule must not notice.
    EnvironmentState env = initial_state(spec, 77);
    for (std::size_t t = 1; t <= spec.horizon; ++t) {
        if (t > 1) advance(env, spec, t, 77);
        (void)sample_reward(env, t % spec.arm_slots(), 77);
        REQUIRE(env.arms == a.arms[t - 1]);
    }
    CHECK(record_trajectory(spec, 77).arms == a.arms);
}

TEST_CASE("reward range bound") {
    CHECK(reward_range_bound(make_preset("bernoulli-s4.1", {}, 1)) == 1.0);
    const EnvironmentSpec desk = make_preset("logistics-desk", {}, 1);
    CHECK(reward_range_bound(desk) == doctest::Approx(0.8 + 3.0 * 0.3));
}
