#pragma once

#include <string>

#include "pameq/pipeline.hpp"

namespace pameq {

// Parses the flat sectioned config format:
//
//   [section]
//   key = value            # trailing comments allowed
//
// Unknown sections or keys are hard errors (silent misconfiguration would
// corrupt replication claims), as are malformed values. Lists are
// comma-separated. Booleans accept true/false/1/0.
ExperimentConfig parse_config(const std::string& text);

// Reads and parses a config file; missing file raises ConfigError.
ExperimentConfig read_config_file(const std::string& path);

// Renders a config back into the file format (round-trip parseable).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace pameq
