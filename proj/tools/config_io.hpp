#pragma once

#include <string>
#include <vector>

#include "mmtc/sim.hpp"

namespace mmtc {

/// Parses a flat YAML mapping into a SimConfig. Keys not present keep their
/// defaults; schema_version is mandatory and unknown keys are errors. The
/// result is validated. Throws ContractError with the offending key.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Fully resolved config as flat YAML, readable by parse_config.
std::string dump_config(const SimConfig& config);

/// All recognized keys in schema order.
std::vector<std::string> config_keys();

}  // namespace mmtc
