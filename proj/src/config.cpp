#include "raven/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "raven/error.hpp"

namespace raven {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kCommandNames = {
    "run", "compare", "sweep", "tune", "scaling", "moments",
};

/// Typed access to one JSON object that remembers which keys were read.
class ObjectReader {
public:
    ObjectReader(const json& j, const std::string& where) : j_(j) {
        if (!j.is_object()) {
            throw ConfigError(where, "expected an object");
        }
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::optional<double> number(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) throw ConfigError(key, "expected a number");
        return v->get<double>();
    }

    std::optional<std::size_t> count(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return as_count(*v, key);
    }

    std::optional<std::uint64_t> u64(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return as_unsigned<std::uint64_t>(*v, key);
    }

    std::optional<std::string> string(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) throw ConfigError(key, "expected a string");
        return v->get<std::string>();
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_array()) throw ConfigError(key, "expected a list of numbers");
        std::vector<double> out;
        for (const json& e : *v) {
            if (!e.is_number()) throw ConfigError(key, "expected a list of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::optional<std::vector<std::size_t>> counts(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_array()) throw ConfigError(key, "expected a list of integers");
        std::vector<std::size_t> out;
        for (const json& e : *v) {
            out.push_back(as_count(e, key));
        }
        return out;
    }

    std::optional<std::vector<std::string>> strings(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_array()) throw ConfigError(key, "expected a list of strings");
        std::vector<std::string> out;
        for (const json& e : *v) {
            if (!e.is_string()) throw ConfigError(key, "expected a list of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    /// Throws for the first key (in sorted order) that was never read.
    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(key, "unknown key");
            }
        }
    }

private:
    template <class T>
    static T as_unsigned(const json& v, const std::string& key) {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError(key, "expected a non-negative integer");
        }
        return v.get<T>();
    }

    static std::size_t as_count(const json& v, const std::string& key) {
        return as_unsigned<std::size_t>(v, key);
    }

    const json& j_;
    std::set<std::string> seen_;
};

template <class T>
void assign(std::optional<T> v, T& out) {
    if (v) out = *v;
}

Interval read_interval(ObjectReader& r, const std::string& key, Interval fallback) {
    const auto v = r.numbers(key);
    if (!v) return fallback;
    if (v->size() != 2) throw ConfigError(key, "expected [lo, hi]");
    return {(*v)[0], (*v)[1]};
}

PresetOptions read_env_options(ObjectReader& r) {
    PresetOptions o;
    o.k = r.count("k");
    o.mu_min = r.number("mu_min");
    o.mu_max = r.number("mu_max");
    o.sigma2_min = r.number("sigma2_min");
    o.sigma2_max = r.number("sigma2_max");
    o.sigma2 = r.number("sigma2");
    o.reset_interval = r.count("reset_interval");
    o.drift_rate = r.number("drift_rate");
    o.variance_rate = r.number("variance_rate");
    o.blip_delta = r.number("blip_delta");
    o.blip_fraction = r.number("blip_fraction");
    o.period = r.count("period");
    return o;
}

json env_to_json(const std::string& preset, const PresetOptions& o) {
    json j;
    j["preset"] = preset;
    const auto put = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    put("k", o.k);
    put("mu_min", o.mu_min);
    put("mu_max", o.mu_max);
    put("sigma2_min", o.sigma2_min);
    put("sigma2_max", o.sigma2_max);
    put("sigma2", o.sigma2);
    put("reset_interval", o.reset_interval);
    put("drift_rate", o.drift_rate);
    put("variance_rate", o.variance_rate);
    put("blip_delta", o.blip_delta);
    put("blip_fraction", o.blip_fraction);
    put("period", o.period);
    return j;
}

void check_increasing(const std::vector<std::size_t>& hs, const std::string& key,
                      std::size_t min_size) {
    if (hs.size() < min_size) {
        throw ConfigError(key, "needs at least " + std::to_string(min_size) + " entries");
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[i] == 0) throw ConfigError(key, "entries must be >= 1");
        if (i > 0 && hs[i] <= hs[i - 1]) throw ConfigError(key, "must be strictly increasing");
    }
}

}  // namespace

std::string_view to_string(Command c) { return kCommandNames.at(static_cast<std::size_t>(c)); }

std::optional<Command> parse_command(std::string_view name) {
    for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
        if (kCommandNames[i] == name) return static_cast<Command>(i);
    }
    return std::nullopt;
}

PolicySpec policy_from_json(const json& j) {
    if (j.is_string()) {
        return policy_from_json(json{{"kind", j}});
    }
    ObjectReader r(j, "policies");
    const auto kind_name = r.string("kind");
    if (!kind_name) throw ConfigError("kind", "policy kind required");
    const auto kind = parse_policy_kind(*kind_name);
    if (!kind) throw ConfigError("kind", "unknown policy kind '" + *kind_name + "'");
    if (*kind == PolicyKind::oracle) {
        throw ConfigError("kind", "oracle is evaluation-only");
    }
    PolicyParams params = default_params(*kind);
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RavenConfig>) {
                assign(r.number("alpha0"), p.alpha0);
                assign(r.number("beta0"), p.beta0);
                assign(r.number("epsilon"), p.epsilon);
            } else if constexpr (std::is_same_v<P, UcbVParams>) {
                p.range_bound = r.number("range_bound");
            } else if constexpr (std::is_same_v<P, EpsilonGreedyParams>) {
                assign(r.number("epsilon"), p.epsilon);
            } else if constexpr (std::is_same_v<P, ThompsonGaussianParams>) {
                assign(r.number("prior_mean"), p.prior_mean);
                assign(r.number("prior_var"), p.prior_var);
                assign(r.number("obs_var"), p.obs_var);
            } else if constexpr (std::is_same_v<P, SlidingWindowParams>) {
                assign(r.count("window"), p.window);
            } else if constexpr (std::is_same_v<P, DiscountParams>) {
                assign(r.number("gamma"), p.gamma);
            } else if constexpr (std::is_same_v<P, FdswParams>) {
                assign(r.number("gamma"), p.gamma);
                assign(r.count("window"), p.window);
            }
        },
        params);
    const std::string name = r.string("name").value_or("");
    r.finish();
    PolicySpec spec(std::move(params), name);
    spec.validate();
    return spec;
}

json policy_to_json(const PolicySpec& spec) {
    json j;
    j["kind"] = std::string(to_string(spec.kind()));
    j["name"] = spec.name;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RavenConfig>) {
                j["alpha0"] = p.alpha0;
                j["beta0"] = p.beta0;
                j["epsilon"] = p.epsilon;
            } else if constexpr (std::is_same_v<P, UcbVParams>) {
                if (p.range_bound) j["range_bound"] = *p.range_bound;
            } else if constexpr (std::is_same_v<P, EpsilonGreedyParams>) {
                j["epsilon"] = p.epsilon;
            } else if constexpr (std::is_same_v<P, ThompsonGaussianParams>) {
                j["prior_mean"] = p.prior_mean;
                j["prior_var"] = p.prior_var;
                j["obs_var"] = p.obs_var;
            } else if constexpr (std::is_same_v<P, SlidingWindowParams>) {
                j["window"] = p.window;
            } else if constexpr (std::is_same_v<P, DiscountParams>) {
                j["gamma"] = p.gamma;
            } else if constexpr (std::is_same_v<P, FdswParams>) {
                j["gamma"] = p.gamma;
                j["window"] = p.window;
            }
        },
        spec.params);
    return j;
}

json parse_policy_flag(std::string_view flag) {
    const std::size_t colon = flag.find(':');
    json j;
    j["kind"] = std::string(flag.substr(0, colon));
    if (colon == std::string_view::npos) {
        return j;
    }
    std::string_view rest = flag.substr(colon + 1);
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ConfigError("policy", "expected key=value, got '" + std::string(item) + "'");
        }
        const std::string key(item.substr(0, eq));
        const std::string value(item.substr(eq + 1));
        if (key == "kind") {
            throw ConfigError("kind", "kind is given before ':'");
        }
        j[key] = json::parse(value, nullptr, false);
        if (j[key].is_discarded()) {
            j[key] = value;
        }
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return j;
}

EnvironmentSpec RunConfig::environment() const {
    if (!env) {
        throw ConfigError("env", "command '" + std::string(to_string(command)) +
                                     "' has no environment");
    }
    PresetOptions o = env_options;
    o.horizon = horizon;
    return make_preset(*env, o, seed);
}

ExperimentOptions RunConfig::experiment_options() const { return {parallel, checkpoint_stride}; }

RunConfig parse_config(const json& doc) {
    ObjectReader r(doc, "config");
    RunConfig c;

    const auto command = r.string("command");
    if (!command) throw ConfigError("command", "required");
    const auto cmd = parse_command(*command);
    if (!cmd) throw ConfigError("command", "unknown command '" + *command + "'");
    c.command = *cmd;

    const auto seed = r.u64("seed");
    if (!seed) throw ConfigError("seed", "required");
    c.seed = *seed;

    PresetOptions env_overrides;
    if (const json* e = r.find("env")) {
        if (e->is_string()) {
            c.env = e->get<std::string>();
        } else {
            ObjectReader er(*e, "env");
            c.env = er.string("preset");
            if (!c.env) throw ConfigError("preset", "env.preset required");
            env_overrides = read_env_options(er);
            er.finish();
        }
    }

    if (const json* p = r.find("policies")) {
        if (!p->is_array()) throw ConfigError("policies", "expected a list");
        for (const json& item : *p) {
            c.policies.push_back(policy_from_json(item));
        }
    }

    const auto horizon = r.count("horizon");
    const auto trials = r.count("trials");
    assign(r.string("out_dir"), c.out_dir);
    assign(r.count("checkpoint_stride"), c.checkpoint_stride);
    assign(r.count("parallel"), c.parallel);
    if (c.parallel < 1) throw ConfigError("parallel", "must be >= 1");

    if (const json* s = r.find("sweep")) {
        ObjectReader sr(*s, "sweep");
        assign(sr.numbers("alpha0_values"), c.sweep.alpha0_values);
        assign(sr.numbers("beta0_values"), c.sweep.beta0_values);
        assign(sr.number("epsilon"), c.sweep.epsilon);
        assign(sr.strings("scenarios"), c.sweep.scenarios);
        assign(sr.counts("horizons"), c.sweep.horizons);
        sr.finish();
    }
    c.sweep.validate();

    if (const json* t = r.find("tune")) {
        ObjectReader tr(*t, "tune");
        assign(tr.count("candidates"), c.tune.candidates);
        if (const json* rg = tr.find("ranges")) {
            ObjectReader rr(*rg, "ranges");
            c.tune.ranges.alpha0 = read_interval(rr, "alpha0", c.tune.ranges.alpha0);
            c.tune.ranges.beta0 = read_interval(rr, "beta0", c.tune.ranges.beta0);
            c.tune.ranges.epsilon = read_interval(rr, "epsilon", c.tune.ranges.epsilon);
            rr.finish();
        }
        tr.finish();
    }
    if (c.tune.candidates < 1) throw ConfigError("candidates", "must be >= 1");
    c.tune.ranges.validate();

    if (const json* s = r.find("scaling")) {
        ObjectReader sr(*s, "scaling");
        assign(sr.counts("horizons"), c.scaling.horizons);
        sr.finish();
    }
    check_increasing(c.scaling.horizons, "horizons", 3);

    if (const json* m = r.find("moments")) {
        ObjectReader mr(*m, "moments");
        assign(mr.counts("sizes"), c.moments.sizes);
        mr.finish();
    }
    if (c.moments.sizes.empty()) throw ConfigError("sizes", "must not be empty");
    for (std::size_t n : c.moments.sizes) {
        if (n == 0) throw ConfigError("sizes", "entries must be >= 1");
    }
    r.finish();

    // Command-specific defaults and constraints.
    const bool needs_env = c.command == Command::run || c.command == Command::compare ||
                           c.command == Command::tune || c.command == Command::scaling;
    if (needs_env && !c.env) {
        throw ConfigError("env", "required by '" + *command + "'");
    }
    if (!needs_env && c.env) {
        throw ConfigError("env", "not used by '" + *command + "'");
    }
    if (!needs_env && horizon) {
        throw ConfigError("horizon", "not used by '" + *command + "'");
    }

    switch (c.command) {
        case Command::run:
            if (c.policies.size() != 1) throw ConfigError("policies", "run takes exactly one policy");
            break;
        case Command::compare:
            if (c.policies.empty()) throw ConfigError("policies", "at least one policy required");
            break;
        case Command::scaling:
            if (c.policies.empty()) {
                c.policies = {PolicySpec(Ucb1Params{}), PolicySpec(RavenConfig{})};
            }
            if (c.policies.size() != 2) {
                throw ConfigError("policies", "scaling takes a baseline and a candidate");
            }
            break;
        case Command::sweep:
        case Command::tune:
        case Command::moments:
            if (!c.policies.empty()) {
                throw ConfigError("policies", "not used by '" + *command + "'");
            }
            break;
    }
    std::set<std::string> names;
    for (const PolicySpec& p : c.policies) {
        if (!names.insert(p.name).second) {
            throw ConfigError("policies", "duplicate policy name '" + p.name + "'");
        }
    }

    if (needs_env) {
        const PresetDefaults d = preset_defaults(*c.env);
        if (c.command == Command::scaling) {
            const std::size_t longest = c.scaling.horizons.back();
            c.horizon = horizon.value_or(longest);
            if (c.horizon < longest) {
                throw ConfigError("horizon", "must cover the longest scaling horizon");
            }
        } else {
            c.horizon = horizon.value_or(d.horizon);
        }
        c.trials = trials.value_or(d.trials);
        if (c.horizon < 1) throw ConfigError("horizon", "must be >= 1");
        c.env_options = resolve_preset_options(*c.env, env_overrides);
        c.env_options.horizon.reset();
        (void)c.environment();
        if (c.checkpoint_stride == 0) {
            c.checkpoint_stride = default_checkpoint_stride(c.horizon);
        }
    } else {
        c.trials = trials.value_or(c.command == Command::moments ? 100 : 20);
    }
    if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = std::string(to_string(c.command));
    j["seed"] = c.seed;
    if (c.env) {
        j["env"] = env_to_json(*c.env, c.env_options);
        j["horizon"] = c.horizon;
    }
    j["policies"] = json::array();
    for (const PolicySpec& p : c.policies) {
        j["policies"].push_back(policy_to_json(p));
    }
    j["trials"] = c.trials;
    j["out_dir"] = c.out_dir;
    j["checkpoint_stride"] = c.checkpoint_stride;
    j["parallel"] = c.parallel;
    j["sweep"] = {{"alpha0_values", c.sweep.alpha0_values},
                  {"beta0_values", c.sweep.beta0_values},
                  {"epsilon", c.sweep.epsilon},
                  {"scenarios", c.sweep.scenarios},
                  {"horizons", c.sweep.horizons}};
    const SearchRanges& rg = c.tune.ranges;
    j["tune"] = {{"candidates", c.tune.candidates},
                 {"ranges",
                  {{"alpha0", {rg.alpha0.lo, rg.alpha0.hi}},
                   {"beta0", {rg.beta0.lo, rg.beta0.hi}},
                   {"epsilon", {rg.epsilon.lo, rg.epsilon.hi}}}}};
    j["scaling"] = {{"horizons", c.scaling.horizons}};
    j["moments"] = {{"sizes", c.moments.sizes}};
    return j;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot read '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config", "'" + path + "' is not valid JSON");
    }
    return j;
}

}  // namespace raven
