#pragma once

// Experiment configuration: JSON schema validation, preset resolution,
// and the config hash embedded in every output for reproducibility.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiflow/markov_map.hpp"

namespace semiflow {

struct ExperimentConfig {
    int schema_version = 1;
    MapSpec map_spec;           // resolved (presets expanded)
    std::string map_name;       // preset name or "custom"
    std::string roof_name = "constant";
    int grid_m = 1025;
    std::vector<std::string> observables = {"usin", "usin"};
    std::vector<double> t_grid;
    std::vector<double> b_grid = {10, 30, 100};
    double noise_floor = 1e-7;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string config_hash;    // FNV-1a of the canonical JSON dump
    nlohmann::json canonical;   // the resolved configuration
};

/// Parses and validates a configuration file. Throws ConfigError with a
/// schema diagnostic on any malformed input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& j);

/// Built-in configuration for "<map>-<roof>" presets, e.g.
/// "doub2-quadratic".
ExperimentConfig preset_config(const std::string& name);

/// FNV-1a hash of a string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

} // namespace semiflow
