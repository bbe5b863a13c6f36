#ifndef CTPUT_CONFIG_HPP
#define CTPUT_CONFIG_HPP

// Experiment configuration: JSON schema, validation and round-trippable
// serialization.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctput/core.hpp"

namespace ctput {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Model { Fluid = 0, Sim = 1, Stationary = 2, Approx = 3 };
inline constexpr int kNumModels = 4;

const char* model_name(Model m);
std::optional<Model> model_from_name(const std::string& name);

struct SimSettings {
    uint64_t n_rounds = 2'000'000;
    uint64_t warmup_rounds = 0;  // 0 means n_rounds / 10
    uint32_t n_replicas = 8;

    uint64_t effective_warmup() const { return warmup_rounds ? warmup_rounds : n_rounds / 10; }
    bool operator==(const SimSettings&) const = default;
};

struct LimitSettings {
    uint64_t n = 10'000;
    uint64_t burn_in = 100;
    double v0 = 0.0;

    bool operator==(const LimitSettings&) const = default;
};

// User-supplied reference values (e.g. packet-level simulator output)
// carried through to the emitted tables as annotations only.
struct ReferencePoint {
    double p = 0.0;
    double window = 0.0;
    double goodput = 0.0;  // 0 means not provided

    bool operator==(const ReferencePoint&) const = default;
};

struct ExperimentConfig {
    CompoundParams params;
    std::vector<double> p_list;   // kept sorted descending (table order)
    std::vector<Model> models;    // canonical order, no duplicates
    SimSettings sim;
    LimitSettings limit;
    uint64_t seed = 1;
    bool seed_set = false;  // true when the seed came from file/flag
    std::string out_dir = ".";
    std::string format = "csv";  // "csv" | "md" (md is written in addition)
    Model baseline = Model::Fluid;
    double packet_size_bytes = 1050.0;  // metadata only
    std::vector<ReferencePoint> reference;

    bool has_model(Model m) const;
    bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig default_config();

// Strict parser: unknown keys, out-of-range loss rates, an empty model
// list or a bad format are errors. p_list is normalized to descending
// order.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string emit_config_json(const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

// Seed precedence: explicit CLI value, then the config file, then the
// COMPOUND_TPUT_SEED environment variable, then the built-in default.
uint64_t resolve_seed(const std::optional<uint64_t>& cli_seed, const ExperimentConfig& cfg);

}  // namespace ctput

#endif
