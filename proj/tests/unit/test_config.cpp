#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "raven/config.hpp"
#include "raven/error.hpp"

using namespace raven;
using nlohmann::json;

namespace {

std::string rejected_key(const json& doc) {
    try {
        (void)parse_config(doc);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

json minimal_compare() {
    return {{"command", "compare"},
            {"env", "logistics-desk"},
            {"policies", {"raven_ucb", "ucb1"}},
            {"horizon", 10000},
            {"trials", 10},
            {"seed", 42}};
}

}  // namespace

TEST_CASE("minimal compare config resolves every default") {
    const RunConfig c = parse_config(minimal_compare());
    CHECK(c.command == Command::compare);
    CHECK(c.env == "logistics-desk");
    REQUIRE(c.policies.size() == 2);
    CHECK(c.policies[0].name == "raven_ucb");
    CHECK(std::get<RavenConfig>(c.policies[0].params) == RavenConfig{});
    CHECK(c.policies[1].kind() == PolicyKind::ucb1);
    CHECK(c.horizon == 10000);
    CHECK(c.trials == 10);
    CHECK(c.seed == 42);
    CHECK(c.parallel == 1);
    CHECK(c.checkpoint_stride == 10);
    CHECK(c.env_options.k == 20u);
    CHECK(c.env_options.reset_interval == 2000u);
    CHECK_FALSE(c.env_options.horizon.has_value());

    const json echo = to_json(c);
    CHECK(echo["policies"][0]["alpha0"] == 1.0);
    CHECK(echo["policies"][0]["beta0"] == 1.0);
    CHECK(echo["policies"][0]["epsilon"] == 1e-3);
    CHECK(echo["env"]["k"] == 20);
    CHECK(echo["env"]["sigma2_max"] == 0.09);
    CHECK(echo["checkpoint_stride"] == 10);
    CHECK(echo.contains("out_dir"));
}

TEST_CASE("negative beta0 is rejected by key") {
    json doc = minimal_compare();
    doc["policies"] = {{{"kind", "raven_ucb"}, {"beta0", -1}}};
    CHECK(rejected_key(doc) == "beta0");
}

TEST_CASE("logistics-table2 reproduces the published configuration") {
    const RunConfig c = parse_config({{"command", "compare"},
                                      {"env", "logistics-table2"},
                                      {"policies", {"raven_ucb"}},
                                      {"horizon", 50000},
                                      {"trials", 50},
                                      {"seed", 1}});
    CHECK(c.horizon == 50000);
    CHECK(c.trials == 50);
    const EnvironmentSpec env = c.environment();
    CHECK(env.arm_slots() == 100);
    CHECK(env.horizon == 50000);
    REQUIRE(env.initial_draw.has_value());
    CHECK(env.initial_draw->mu_min == 0.3);
    CHECK(env.initial_draw->mu_max == 0.8);
    CHECK(env.initial_draw->sigma2_min == 0.01);
    CHECK(env.initial_draw->sigma2_max == 0.09);
    const auto& jump = std::get<LocalizedJump>(env.scenario);
    CHECK(jump.interval == 5000);
    CHECK(jump.reset_count == 33);

    // Preset defaults alone give the same run.
    const RunConfig d = parse_config(
        {{"command", "compare"}, {"env", "logistics-table2"}, {"policies", {"raven_ucb"}}, {"seed", 1}});
    CHECK(d == c);
}

TEST_CASE("echoed config parses back to the same config") {
    const std::vector<json> docs = {
        minimal_compare(),
        {{"command", "run"},
         {"env", {{"preset", "incremental"}, {"drift_rate", 1e-4}}},
         {"policies", {{{"kind", "sw_ucb"}, {"window", 50}, {"name", "sw50"}}}},
         {"seed", 3}},
        {{"command", "compare"},
         {"env", "bernoulli-s4.1"},
         {"policies",
          {"ucb_v", "epsilon_greedy", "thompson_beta", "thompson_gaussian", "d_ucb", "fdsw_ts_min",
           {{"kind", "raven_ucb"}, {"alpha0", 0.3}, {"name", "tuned"}}}},
         {"trials", 2},
         {"parallel", 4},
         {"seed", 0}},
        {{"command", "sweep"}, {"seed", 9}, {"sweep", {{"horizons", {100, 200}}}}},
        {{"command", "tune"},
         {"env", "blips"},
         {"seed", 9},
         {"tune", {{"candidates", 5}, {"ranges", {{"beta0", {0.1, 2.0}}}}}}},
        {{"command", "scaling"}, {"env", "bernoulli-s4.1"}, {"seed", 9}},
        {{"command", "moments"}, {"seed", 9}, {"moments", {{"sizes", {2, 3}}}}},
    };
    for (const json& doc : docs) {
        CAPTURE(doc.dump());
        const RunConfig c = parse_config(doc);
        const json echo = to_json(c);
        CHECK(parse_config(echo) == c);
        CHECK(to_json(parse_config(echo)) == echo);
        CHECK(parse_config(json::parse(echo.dump())) == c);
    }
}

TEST_CASE("structured errors name the key") {
    json doc = minimal_compare();
    doc.erase("seed");
    CHECK(rejected_key(doc) == "seed");

    doc = minimal_compare();
    doc["horizn"] = 5;
    CHECK(rejected_key(doc) == "horizn");

    doc = minimal_compare();
    doc["env"] = {{"preset", "logistics-desk"}, {"drift_rate", 0.1}};
    CHECK(rejected_key(doc) == "drift_rate");

    doc = minimal_compare();
    doc["env"] = {{"preset", "logistics-desk"}, {"kk", 3}};
    CHECK(rejected_key(doc) == "kk");

    doc = minimal_compare();
    doc["policies"] = {{{"kind", "ucb1"}, {"alpha0", 1}}};
    CHECK(rejected_key(doc) == "alpha0");

    doc = minimal_compare();
    doc["policies"] = {"softmax"};
    CHECK(rejected_key(doc) == "kind");

    doc = minimal_compare();
    doc["policies"] = {"oracle"};
    CHECK(rejected_key(doc) == "kind");

    doc = minimal_compare();
    doc["trials"] = -3;
    CHECK(rejected_key(doc) == "trials");

    doc = minimal_compare();
    doc["trials"] = 0;
    CHECK(rejected_key(doc) == "trials");

    doc = minimal_compare();
    doc["seed"] = "42";
    CHECK(rejected_key(doc) == "seed");

    doc = minimal_compare();
    doc["env"] = "nowhere";
    CHECK(rejected_key(doc) == "env");

    doc = minimal_compare();
    doc["policies"] = {{{"kind", "epsilon_greedy"}, {"epsilon", 1.5}}};
    CHECK(rejected_key(doc) == "epsilon");

    doc = minimal_compare();
    doc["policies"] = {{{"kind", "d_ucb"}, {"gamma", 0}}};
    CHECK(rejected_key(doc) == "gamma");

    doc = minimal_compare();
    doc["parallel"] = 0;
    CHECK(rejected_key(doc) == "parallel");

    doc = minimal_compare();
    doc["command"] = "plot";
    CHECK(rejected_key(doc) == "command");

    doc = {{"command", "sweep"}, {"seed", 1}, {"sweep", {{"alpha0_values", json::array()}}}};
    CHECK(rejected_key(doc) == "alpha0");

    doc = {{"command", "sweep"}, {"seed", 1}, {"sweep", {{"scenarios", {"bogus"}}}}};
    CHECK(rejected_key(doc) == "env");
}

TEST_CASE("command constraints") {
    json doc = minimal_compare();
    doc["command"] = "run";
    CHECK(rejected_key(doc) == "policies");

    doc = minimal_compare();
    doc["policies"] = json::array();
    CHECK(rejected_key(doc) == "policies");

    doc = minimal_compare();
    doc["policies"] = {"ucb1", "ucb1"};
    CHECK(rejected_key(doc) == "policies");
    doc["policies"] = {"ucb1", {{"kind", "ucb1"}, {"name", "ucb1_b"}}};
    CHECK(rejected_key(doc).empty());

    doc = minimal_compare();
    doc.erase("env");
    CHECK(rejected_key(doc) == "env");

    doc = {{"command", "sweep"}, {"seed", 1}, {"env", "blips"}};
    CHECK(rejected_key(doc) == "env");
    doc = {{"command", "sweep"}, {"seed", 1}, {"horizon", 10}};
    CHECK(rejected_key(doc) == "horizon");
    doc = {{"command", "moments"}, {"seed", 1}, {"policies", {"ucb1"}}};
    CHECK(rejected_key(doc) == "policies");

    doc = {{"command", "scaling"}, {"env", "bernoulli-s4.1"}, {"seed", 1}, {"horizon", 5000}};
    CHECK(rejected_key(doc) == "horizon");
    doc = {{"command", "scaling"}, {"env", "bernoulli-s4.1"}, {"seed", 1}, {"policies", {"ucb1"}}};
    CHECK(rejected_key(doc) == "policies");
    doc = {{"command", "scaling"}, {"env", "bernoulli-s4.1"}, {"seed", 1},
           {"scaling", {{"horizons", {100, 50, 200}}}}};
    CHECK(rejected_key(doc) == "horizons");

    const RunConfig s = parse_config({{"command", "scaling"}, {"env", "bernoulli-s4.1"}, {"seed", 1}});
    CHECK(s.horizon == 10000);
    REQUIRE(s.policies.size() == 2);
    CHECK(s.policies[0].kind() == PolicyKind::ucb1);
    CHECK(s.policies[1].kind() == PolicyKind::raven_ucb);

    CHECK(parse_config({{"command", "sweep"}, {"seed", 1}}).trials == 20);
    CHECK(parse_config({{"command", "moments"}, {"seed", 1}}).trials == 100);
    CHECK_THROWS_AS((void)parse_config({{"command", "moments"}, {"seed", 1}}).environment(),
                    ConfigError);
}

TEST_CASE("environment overrides change the built spec") {
    const RunConfig c = parse_config({{"command", "run"},
                                      {"env", {{"preset", "logistics-desk"}, {"k", 6}}},
                                      {"policies", {"ucb1"}},
                                      {"seed", 4}});
    CHECK(c.environment().arm_slots() == 6);
    CHECK(std::get<LocalizedJump>(c.environment().scenario).reset_count == 2);
}

TEST_CASE("policy flags") {
    CHECK(parse_policy_flag("ucb1") == json{{"kind", "ucb1"}});
    CHECK(parse_policy_flag("raven_ucb:alpha0=5,beta0=0.5,name=tuned") ==
          json{{"kind", "raven_ucb"}, {"alpha0", 5}, {"beta0", 0.5}, {"name", "tuned"}});
    CHECK(parse_policy_flag("sw_ucb:window=50")["window"] == 50);
    CHECK_THROWS_AS((void)parse_policy_flag("ucb1:alpha0"), ConfigError);
    CHECK_THROWS_AS((void)parse_policy_flag("ucb1:kind=ucb_v"), ConfigError);

    const PolicySpec p = policy_from_json(parse_policy_flag("raven_ucb:alpha0=5,beta0=0.5,name=tuned"));
    CHECK(p.name == "tuned");
    CHECK(std::get<RavenConfig>(p.params) == RavenConfig{5.0, 0.5, 1e-3});
    CHECK(policy_from_json(policy_to_json(p)) == p);
}

TEST_CASE("config files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "raven_config_test";
    fs::create_directories(dir);
    {
        std::ofstream(dir / "good.json") << minimal_compare().dump(2);
        std::ofstream(dir / "bad.json") << "{\"command\": ";
    }
    CHECK(parse_config(load_config_file((dir / "good.json").string())) ==
          parse_config(minimal_compare()));
    try {
        (void)load_config_file((dir / "bad.json").string());
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "config");
    }
    CHECK_THROWS_AS((void)load_config_file((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("command names") {
    for (Command c : {Command::run, Command::compare, Command::sweep, Command::tune, Command::scaling,
                      Command::moments}) {
        CHECK(parse_command(to_string(c)) == c);
    }
    CHECK_FALSE(parse_command("plot").has_value());
}
