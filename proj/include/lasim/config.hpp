#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lasim/harness.hpp"

namespace lasim {

// Strict conversion: unknown keys and malformed values raise ConfigError
// naming the exact field path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Reads a config file; .toml files go through the TOML subset reader, all
// others are parsed as JSON.
ExperimentConfig load_config_file(const std::string& path);

// Applies one "dotted.path=value" override onto the JSON tree. Array
// elements are addressed by index (agents.0.window=100). Values parse as
// JSON scalars, falling back to strings.
void apply_override(nlohmann::json& j, const std::string& assignment);

std::vector<std::string> preset_names();
ExperimentConfig make_preset(const std::string& name);

}  // namespace lasim
