#pragma once

#include <string>
#include <vector>

#include "ctpt/mcmc.hpp"
#include "ctpt/simulation.hpp"

namespace ctpt {

/// Simulation experiment definition as read from a scenario JSON file.
/// Parse errors carry JSON pointer paths to the offending field.
struct ScenarioFile {
  int schema_version = 1;
  std::string name;
  ScenarioConfig scenario;
  int replications = 200;
  std::vector<ErrorFamily> families = {ErrorFamily::Ctpt};
  double cutoff = 10.0;
  ChainConfig chain;
};

ScenarioFile parse_scenario_json(const std::string& text);
ScenarioFile read_scenario_file(const std::string& path);

}  // namespace ctpt
