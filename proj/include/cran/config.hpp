#pragma once

#include <string>
#include <vector>

#include "cran/topology.hpp"

namespace cran {

// Flat key-value scenario file (YAML syntax). Unknown keys are rejected.
// Omitted keys keep the ScenarioConfig defaults.
struct RunConfig {
  ScenarioConfig scenario;
  std::vector<double> sweep_values;  // empty: use the sweep's defaults
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Inverse of parse_run_config for the scenario part; used by the manifest.
std::string scenario_to_yaml(const ScenarioConfig& c);

}  // namespace cran
