// raven-bandit: command-line driver for the bandit library.
//
//   raven-bandit compare --env logistics-desk --policy raven_ucb --policy ucb1 \
//       --trials 20 --seed 42 --out results/desk
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raven/commands.hpp"
#include "raven/config.hpp"
#include "raven/error.hpp"

namespace {

struct Flags {
    std::string config;
    std::string env;
    std::vector<std::string> policies;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> parallel;
};

void add_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config, "JSON config file; flags override its keys");
    cmd.add_option("--env", f.env, "environment preset");
    cmd.add_option("--policy", f.policies, "policy as kind[:key=value,...], repeatable");
    cmd.add_option("--horizon", f.horizon, "steps per trial");
    cmd.add_option("--trials", f.trials, "independent trials");
    cmd.add_option("--seed", f.seed, "master seed (required)");
    cmd.add_option("--out", f.out, "output directory");
    cmd.add_option("--parallel", f.parallel, "worker threads");
}

nlohmann::json merged_document(const std::string& command, const Flags& f) {
    nlohmann::json doc = f.config.empty() ? nlohmann::json::object()
                                          : raven::load_config_file(f.config);
    if (!doc.is_object()) {
        throw raven::ConfigError("config", "top level must be an object");
    }
    doc["command"] = command;
    if (!f.env.empty()) {
        if (doc.contains("env") && doc["env"].is_object() &&
            doc["env"].value("preset", "") == f.env) {
            // Same preset: keep the file's overrides.
        } else {
            doc["env"] = f.env;
        }
    }
    if (!f.policies.empty()) {
        doc["policies"] = nlohmann::json::array();
        for (const std::string& p : f.policies) {
            doc["policies"].push_back(raven::parse_policy_flag(p));
        }
    }
    if (f.horizon) doc["horizon"] = *f.horizon;
    if (f.trials) doc["trials"] = *f.trials;
    if (f.seed) doc["seed"] = *f.seed;
    if (!f.out.empty()) doc["out_dir"] = f.out;
    if (f.parallel) doc["parallel"] = *f.parallel;
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variance-adaptive multi-armed bandit experiments"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"run", "one policy on one environment"},
        {"compare", "several policies on one environment"},
        {"sweep", "alpha0 x beta0 grid over scenario presets"},
        {"tune", "random search over RAVEN-UCB hyperparameters"},
        {"scaling", "baseline vs candidate across horizons"},
        {"moments", "sample mean/variance table of standard normal draws"},
    };
    for (const auto& [name, help] : commands) {
        add_flags(*app.add_subcommand(name, help), flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const raven::RunConfig config = raven::parse_config(merged_document(command, flags));
        raven::execute(config, std::cout);
    } catch (const raven::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
