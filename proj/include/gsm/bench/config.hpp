#pragma once

// JSON configuration files. See README.md for the schema.

#include "gsm/bench/experiments.hpp"
#include "gsm/optimizer.hpp"

#include <string>

namespace gsm {

// Unknown keys and ill-typed values raise ConfigError.
RecoverySpec parse_recovery_spec(const std::string& json_text);
RecoverySpec load_recovery_spec(const std::string& path);
std::string dump_recovery_spec(const RecoverySpec& spec);

HomotopyConfig parse_homotopy_config(const std::string& json_text);
std::string dump_homotopy_config(const HomotopyConfig& cfg);

// All defaults: recovery spec, homotopy and solver settings.
std::string default_config_json();

}  // namespace gsm
