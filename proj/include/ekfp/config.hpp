#pragma once

#include <string>

#include "ekfp/harness.hpp"

namespace ekfp {

// Configs are JSON trees with an explicit "schema_version": 1 field. Unknown
// keys are rejected so a typo in a parameter name cannot silently fall back
// to a default.

struct SweepConfig {
  SweepGrid grid;
};

RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);
// For the nash/verify commands: scenario section only (plus optional "cap").
struct ScenarioOnlyConfig {
  ScenarioSpec scenario;
  std::uint64_t nash_cap = 1'000'000;
  std::uint64_t seed = 1;
};
ScenarioOnlyConfig load_scenario_config(const std::string& path);

// Parse from an in-memory JSON string (tests and tools).
RunConfig parse_run_config_text(const std::string& text);
SweepConfig parse_sweep_config_text(const std::string& text);
ScenarioOnlyConfig parse_scenario_config_text(const std::string& text);

}  // namespace ekfp
