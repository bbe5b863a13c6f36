#include "ctput/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ctput {

using ordered_json = nlohmann::ordered_json;

const char* model_name(Model m) {
    switch (m) {
        case Model::Fluid: return "fluid";
        case Model::Sim: return "sim";
        case Model::Stationary: return "stationary";
        case Model::Approx: return "approx";
    }
    return "?";
}

std::optional<Model> model_from_name(const std::string& name) {
    for (int i = 0; i < kNumModels; ++i)
        if (name == model_name(Model(i))) return Model(i);
    return std::nullopt;
}

bool ExperimentConfig::has_model(Model m) const {
    return std::find(models.begin(), models.end(), m) != models.end();
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    const auto& a = params;
    const auto& b = o.params;
    return a.alpha == b.alpha && a.beta == b.beta && a.k == b.k && a.gamma == b.gamma &&
           a.zeta == b.zeta && a.rtt == b.rtt && p_list == o.p_list && models == o.models &&
           sim == o.sim && limit == o.limit && seed == o.seed && out_dir == o.out_dir &&
           format == o.format && baseline == o.baseline &&
           packet_size_bytes == o.packet_size_bytes && reference == o.reference;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.p_list = {1e-2, 5e-3, 3e-3, 1e-3, 8e-4, 5e-4, 3e-4, 1e-4, 8e-5, 5e-5, 3e-5};
    cfg.models = {Model::Fluid, Model::Sim, Model::Stationary, Model::Approx};
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    if (cfg.p_list.empty()) throw ConfigError("p_list is empty");
    for (double p : cfg.p_list)
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("p_list entries must lie in (0,1)");
    if (!std::is_sorted(cfg.p_list.rbegin(), cfg.p_list.rend()))
        throw ConfigError("p_list must be sorted descending");
    if (cfg.models.empty()) throw ConfigError("models list is empty");
    if (cfg.format != "csv" && cfg.format != "md")
        throw ConfigError("format must be \"csv\" or \"md\"");
    if (cfg.sim.n_replicas < 1) throw ConfigError("sim.n_replicas must be >= 1");
    if (cfg.sim.n_rounds < 10 * cfg.sim.warmup_rounds)
        throw ConfigError("sim.n_rounds must be >= 10*sim.warmup_rounds");
    if (cfg.limit.n <= cfg.limit.burn_in) throw ConfigError("limit.n must exceed limit.burn_in");
    if (!(cfg.limit.v0 >= 0.0)) throw ConfigError("limit.v0 must be >= 0");
    for (const auto& ref : cfg.reference)
        if (!(ref.p > 0.0 && ref.p < 1.0)) throw ConfigError("reference p must lie in (0,1)");
}

namespace {

void check_keys(const ordered_json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) throw ConfigError(std::string("unknown key \"") + key + "\" in " + where);
    }
}

template <typename T>
void read_into(const ordered_json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("bad value for \"") + key + "\"");
        }
    }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, "config",
               {"params", "p_list", "models", "sim", "limit", "seed", "out_dir", "format",
                "baseline", "packet_size_bytes", "reference"});

    ExperimentConfig cfg = default_config();

    if (j.contains("params")) {
        const auto& pj = j["params"];
        if (!pj.is_object()) throw ConfigError("params must be an object");
        check_keys(pj, "params", {"alpha", "beta", "k", "gamma", "zeta", "rtt"});
        read_into(pj, "alpha", cfg.params.alpha);
        read_into(pj, "beta", cfg.params.beta);
        read_into(pj, "k", cfg.params.k);
        read_into(pj, "gamma", cfg.params.gamma);
        read_into(pj, "zeta", cfg.params.zeta);
        read_into(pj, "rtt", cfg.params.rtt);
    }
    if (j.contains("p_list")) {
        cfg.p_list.clear();
        read_into(j, "p_list", cfg.p_list);
        std::sort(cfg.p_list.begin(), cfg.p_list.end(), std::greater<double>());
    }
    if (j.contains("models")) {
        std::vector<std::string> names;
        read_into(j, "models", names);
        std::set<Model> seen;
        for (const auto& n : names) {
            auto m = model_from_name(n);
            if (!m) throw ConfigError("unknown model \"" + n + "\"");
            seen.insert(*m);
        }
        cfg.models.assign(seen.begin(), seen.end());  // canonical order
    }
    if (j.contains("sim")) {
        const auto& sj = j["sim"];
        check_keys(sj, "sim", {"n_rounds", "warmup_rounds", "n_replicas"});
        read_into(sj, "n_rounds", cfg.sim.n_rounds);
        read_into(sj, "warmup_rounds", cfg.sim.warmup_rounds);
        read_into(sj, "n_replicas", cfg.sim.n_replicas);
    }
    if (j.contains("limit")) {
        const auto& lj = j["limit"];
        check_keys(lj, "limit", {"n", "burn_in", "v0"});
        read_into(lj, "n", cfg.limit.n);
        read_into(lj, "burn_in", cfg.limit.burn_in);
        read_into(lj, "v0", cfg.limit.v0);
    }
    if (j.contains("seed")) {
        read_into(j, "seed", cfg.seed);
        cfg.seed_set = true;
    }
    read_into(j, "out_dir", cfg.out_dir);
    read_into(j, "format", cfg.format);
    if (j.contains("baseline")) {
        std::string b;
        read_into(j, "baseline", b);
        auto m = model_from_name(b);
        if (!m) throw ConfigError("unknown baseline model \"" + b + "\"");
        cfg.baseline = *m;
    }
    read_into(j, "packet_size_bytes", cfg.packet_size_bytes);
    if (j.contains("reference")) {
        const auto& rj = j["reference"];
        if (!rj.is_array()) throw ConfigError("reference must be an array");
        for (const auto& e : rj) {
            check_keys(e, "reference entry", {"p", "window", "goodput"});
            ReferencePoint ref;
            read_into(e, "p", ref.p);
            read_into(e, "window", ref.window);
            read_into(e, "goodput", ref.goodput);
            cfg.reference.push_back(ref);
        }
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_json(buf.str());
}

std::string emit_config_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["params"] = {{"alpha", cfg.params.alpha}, {"beta", cfg.params.beta}, {"k", cfg.params.k},
                   {"gamma", cfg.params.gamma}, {"zeta", cfg.params.zeta}, {"rtt", cfg.params.rtt}};
    j["p_list"] = cfg.p_list;
    std::vector<std::string> names;
    for (Model m : cfg.models) names.emplace_back(model_name(m));
    j["models"] = names;
    j["sim"] = {{"n_rounds", cfg.sim.n_rounds},
                {"warmup_rounds", cfg.sim.warmup_rounds},
                {"n_replicas", cfg.sim.n_replicas}};
    j["limit"] = {{"n", cfg.limit.n}, {"burn_in", cfg.limit.burn_in}, {"v0", cfg.limit.v0}};
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["format"] = cfg.format;
    j["baseline"] = model_name(cfg.baseline);
    j["packet_size_bytes"] = cfg.packet_size_bytes;
    if (!cfg.reference.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& ref : cfg.reference)
            arr.push_back({{"p", ref.p}, {"window", ref.window}, {"goodput", ref.goodput}});
        j["reference"] = arr;
    }
    return j.dump(2) + "\n";
}

uint64_t resolve_seed(const std::optional<uint64_t>& cli_seed, const ExperimentConfig& cfg) {
    if (cli_seed) return *cli_seed;
    if (cfg.seed_set) return cfg.seed;
    if (const char* env = std::getenv("COMPOUND_TPUT_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        throw ConfigError("COMPOUND_TPUT_SEED is not a valid integer");
    }
    return cfg.seed;
}

}  // namespace ctput
