#pragma once

#include "svo/eval.hpp"
#include "svo/odometry.hpp"

#include <map>
#include <string>

namespace svo {

struct RunConfig {
  PipelineConfig pipeline;
  EvalConfig eval;
};

// Flat "key = value" text; '#' starts a comment. Keys not listed by
// config_keys() raise ConfigError, as do malformed values.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// Every key with its current value, sorted; parse_config(serialize_config(c))
// reproduces c exactly.
std::map<std::string, std::string> config_entries(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Applies one key; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

}  // namespace svo
