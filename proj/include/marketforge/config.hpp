#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "marketforge/random_spec.hpp"

namespace marketforge {

class ClassRegistry;

struct MarketConfig {
  std::string name;
  std::string class_name;
  double tick_size = 0.0;
  double market_price = 0.0;
  double fundamental_price = 0.0;  // defaults to market_price when absent
  nlohmann::json extras = nlohmann::json::object();

  bool operator==(const MarketConfig&) const = default;
};

struct AgentGroupConfig {
  std::string name;
  std::string class_name;
  int num_agents = 0;
  std::vector<std::string> markets;
  RandomSpec asset_volume = RandomSpec::constant(0);
  RandomSpec cash_amount = RandomSpec::constant(0);
  // class-recognized parameter fields, e.g. fundamentalWeight for FCNAgent
  std::map<std::string, RandomSpec> params;
  // class-recognized string-valued fields, e.g. pricingMode
  std::map<std::string, std::string> string_params;
  nlohmann::json extras = nlohmann::json::object();

  bool operator==(const AgentGroupConfig&) const = default;
};

struct SessionConfig {
  std::string name;
  long iteration_steps = 0;
  bool with_order_placement = true;
  bool with_order_execution = true;
  bool with_print = false;
  std::optional<double> hi_frequency_submit_rate;  // parsed and stored, unused
  std::optional<int> num_step_agents;              // overrides the simulation default
  nlohmann::json extras = nlohmann::json::object();

  bool operator==(const SessionConfig&) const = default;
};

struct SimulationConfig {
  std::vector<MarketConfig> markets;
  std::vector<AgentGroupConfig> agent_groups;
  std::vector<SessionConfig> sessions;
  int num_step_agents = 1;
  nlohmann::json simulation_extras = nlohmann::json::object();
  // unreferenced top-level blocks (e.g. event settings), passed through
  nlohmann::json extras = nlohmann::json::object();

  bool operator==(const SimulationConfig&) const = default;

  const MarketConfig& market(const std::string& name) const;
  int market_index(const std::string& name) const;
};

// Parses a PAMS-style JSON run description. Scalars become Constant specs,
// two-element numeric arrays become uniform ranges (integer-valued when the
// field is integer-semantic), and {"expon": [m]} / {"uniform": [a, b]}
// objects become the named spec. Unknown keys are preserved in `extras` and
// warned about, not rejected.
SimulationConfig parse_config(const std::string& json_text, const ClassRegistry& registry);
SimulationConfig parse_config(const std::string& json_text);

// Canonical JSON for a parsed config; parse(serialize(c)) == c.
nlohmann::json config_to_json(const SimulationConfig& config);
std::string serialize_config(const SimulationConfig& config);

}  // namespace marketforge
