#pragma once

#include <string>
#include <vector>

#include "mcsim/model.hpp"

namespace mcsim {

// Built-in named scenarios; any other name is treated as a JSON file path.
std::vector<std::string> builtin_scenario_names();
ScenarioConfig builtin_scenario(const std::string& name);

// Continental US Abilene network (11 nodes, 14 undirected links). The node
// numbering is an assumption (see README): sources 1-4 are {Sunnyvale,
// Los Angeles, Denver, Houston}, the destination pool 7-11 is {Indianapolis,
// Chicago, Atlanta, New York, Washington DC}, and {Seattle, Kansas City}
// relay. Capacities are calibrated so that processing is the binding
// resource; see the scenario definition for the reasoning.
ScenarioConfig abilene_scenario();

// Y-network: source 1 -> relay 2 -> destinations {3, 4}, 10 packets/slot per
// arc, pass-through service with ample CPU.
ScenarioConfig y_network_scenario(double arc_pps = 10.0);

// Two-node chain with a pass-through service, for oracle-sized instances.
ScenarioConfig chain2_scenario();

ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig resolve_scenario(const std::string& name_or_path);

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& json_text);

// FNV-1a over the canonical JSON form; identifies a resolved config in run
// manifests.
std::string scenario_hash(const ScenarioConfig& config);

}  // namespace mcsim
