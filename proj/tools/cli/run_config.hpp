#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace awls::cli {

/// Every key a config file may set, with its default. Blocks are named after
/// the subcommands. Paths are resolved against the working directory.
nlohmann::json default_config();

/// Overlays `patch` onto `base`; keys missing from `base` are rejected, as are
/// type changes (null defaults accept anything).
void merge_config(nlohmann::json& base, const nlohmann::json& patch, const std::string& where = "");

/// Reads a config file or a manifest written by an earlier run (its stored
/// config is used; the recorded command must match).
nlohmann::json read_config_file(const std::string& path, const std::string& command);

/// AWLS_OUTPUT_DIR and AWLS_JOBS.
void apply_environment(nlohmann::json& config);

/// Checks value ranges and that the paths the command reads exist.
void validate_config(const nlohmann::json& config, const std::string& command);

}  // namespace awls::cli
