#pragma once

#include <string>

#include "nmgle/ensemble.hpp"

namespace nmgle {

/// Parses the flat `key = value` config format (sections via dotted keys,
/// `#` comments, blank lines ignored). Unknown keys, type mismatches and
/// invariant violations raise ConfigError naming the key and line. Missing
/// keys take the SimConfig defaults.
SimConfig parse_config_text(const std::string& text);

/// parse_config_text over a file. Throws IoError if unreadable.
SimConfig parse_config(const std::string& path);

/// Canonical echo of the effective config: every key, one per line, numbers
/// at round-trip precision. echo_config output reparses to an equal
/// SimConfig.
std::string echo_config(const SimConfig& config);

}  // namespace nmgle
