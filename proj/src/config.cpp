#include "marketforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "marketforge/errors.hpp"
#include "marketforge/log.hpp"
#include "marketforge/registry.hpp"

namespace marketforge {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) raise(Errc::missing_key, "'" + key + "' missing in " + where);
  return *it;
}

double require_number(const json& v, const std::string& what) {
  if (!v.is_number()) raise(Errc::malformed_json, what + " must be a number");
  return v.get<double>();
}

bool is_integral(double v) { return std::floor(v) == v; }

long require_count(const json& v, const std::string& what, long min_value) {
  const double d = require_number(v, what);
  if (!is_integral(d)) raise(Errc::malformed_json, what + " must be an integer");
  if (d < static_cast<double>(min_value))
    raise(Errc::bad_range, what + " must be >= " + std::to_string(min_value));
  return static_cast<long>(d);
}

std::vector<std::string> require_name_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty())
    raise(Errc::malformed_json, what + " must be a non-empty array of names");
  std::vector<std::string> names;
  for (const auto& item : v) {
    if (!item.is_string()) raise(Errc::malformed_json, what + " entries must be strings");
    names.push_back(item.get<std::string>());
  }
  return names;
}

RandomSpec parse_uniform_pair(const json& arr, const std::string& field, bool as_int) {
  if (arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number())
    raise(Errc::malformed_json, "'" + field + "' range must be a 2-element numeric array");
  const double lo = arr[0].get<double>();
  const double hi = arr[1].get<double>();
  if (lo > hi) raise(Errc::bad_range, "'" + field + "' range has lo > hi");
  if (as_int && is_integral(lo) && is_integral(hi))
    return RandomSpec::uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
  return RandomSpec::uniform_real(lo, hi);
}

// Field-level inference per the config idiom: scalar -> Constant, bare
// 2-array -> uniform range, {"expon": [m]} / {"uniform": [a, b]} -> named
// spec. Anything else is a parse error.
RandomSpec parse_random_spec(const json& v, const std::string& field, bool int_semantic) {
  if (v.is_number()) return RandomSpec::constant(v.get<double>());
  if (v.is_array()) return parse_uniform_pair(v, field, int_semantic);
  if (v.is_object()) {
    if (v.size() != 1)
      raise(Errc::malformed_json, "'" + field + "' random entity must have exactly one key");
    const auto& [kind, arg] = *v.items().begin();
    if (kind == "expon") {
      if (!arg.is_array() || arg.size() != 1 || !arg[0].is_number())
        raise(Errc::malformed_json, "'" + field + "' expon entity wants [mean]");
      const double mean = arg[0].get<double>();
      if (mean < 0.0) raise(Errc::bad_range, "'" + field + "' exponential mean must be >= 0");
      return RandomSpec::exponential(mean);
    }
    if (kind == "uniform") return parse_uniform_pair(arg, field, /*as_int=*/false);
    raise(Errc::malformed_json, "'" + field + "' uses unsupported random entity '" + kind + "'");
  }
  raise(Errc::malformed_json, "'" + field + "' is not a valid parameter value");
}

std::string canonical_name(const json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  raise(Errc::malformed_json, what + " must be a string or number");
}

MarketConfig parse_market(const std::string& name, const json& block,
                          const ClassRegistry& registry) {
  if (!block.is_object()) raise(Errc::malformed_json, "market block '" + name + "' must be an object");
  MarketConfig mc;
  mc.name = name;
  mc.class_name = require(block, "class", "market '" + name + "'").get<std::string>();
  const auto resolved = registry.resolve(mc.class_name);
  if (resolved.kind != ClassRegistry::Kind::market)
    raise(Errc::unknown_class, "'" + mc.class_name + "' is not a market class");
  mc.tick_size = require_number(require(block, "tickSize", "market '" + name + "'"), "tickSize");
  if (!(mc.tick_size > 0.0)) raise(Errc::bad_range, "tickSize must be positive");
  mc.market_price =
      require_number(require(block, "marketPrice", "market '" + name + "'"), "marketPrice");
  if (!(mc.market_price > 0.0)) raise(Errc::bad_range, "marketPrice must be positive");
  if (block.contains("fundamentalPrice")) {
    mc.fundamental_price = require_number(block["fundamentalPrice"], "fundamentalPrice");
    if (!(mc.fundamental_price > 0.0)) raise(Errc::bad_range, "fundamentalPrice must be positive");
  } else {
    mc.fundamental_price = mc.market_price;
  }
  static const std::set<std::string> known = {"class", "tickSize", "marketPrice",
                                              "fundamentalPrice"};
  for (const auto& [key, value] : block.items()) {
    if (known.count(key) != 0) continue;
    logging::warn("market '" + name + "': ignoring unknown key '" + key + "'");
    mc.extras[key] = value;
  }
  return mc;
}

AgentGroupConfig parse_agent_group(const std::string& name, const json& block,
                                   const ClassRegistry& registry) {
  if (!block.is_object())
    raise(Errc::malformed_json, "agent block '" + name + "' must be an object");
  AgentGroupConfig gc;
  gc.name = name;
  gc.class_name = require(block, "class", "agent group '" + name + "'").get<std::string>();
  const auto resolved = registry.resolve(gc.class_name);
  if (resolved.kind != ClassRegistry::Kind::agent)
    raise(Errc::unknown_class, "'" + gc.class_name + "' is not an agent class");
  gc.num_agents =
      static_cast<int>(require_count(require(block, "numAgents", "agent group '" + name + "'"),
                                     "numAgents", 1));
  gc.markets = require_name_list(require(block, "markets", "agent group '" + name + "'"),
                                 "agent group markets");
  if (block.contains("assetVolume"))
    gc.asset_volume = parse_random_spec(block["assetVolume"], "assetVolume", /*int_semantic=*/true);
  if (block.contains("cashAmount"))
    gc.cash_amount = parse_random_spec(block["cashAmount"], "cashAmount", /*int_semantic=*/false);

  const AgentClassInfo& info = *resolved.agent;
  static const std::set<std::string> common = {"class", "numAgents", "markets", "assetVolume",
                                               "cashAmount"};
  for (const auto& [key, value] : block.items()) {
    if (common.count(key) != 0) continue;
    if (info.real_params.count(key) != 0) {
      gc.params.emplace(key, parse_random_spec(value, key, /*int_semantic=*/false));
    } else if (info.int_params.count(key) != 0) {
      gc.params.emplace(key, parse_random_spec(value, key, /*int_semantic=*/true));
    } else if (info.string_params.count(key) != 0) {
      if (!value.is_string()) raise(Errc::malformed_json, "'" + key + "' must be a string");
      gc.string_params.emplace(key, value.get<std::string>());
    } else {
      logging::warn("agent group '" + name + "': ignoring unknown key '" + key + "'");
      gc.extras[key] = value;
    }
  }
  return gc;
}

SessionConfig parse_session(const json& block, std::size_t index) {
  const std::string where = "session " + std::to_string(index);
  if (!block.is_object()) raise(Errc::malformed_json, where + " must be an object");
  SessionConfig sc;
  sc.name = canonical_name(require(block, "sessionName", where), where + " sessionName");
  sc.iteration_steps = require_count(require(block, "iterationSteps", where), "iterationSteps", 0);
  const json& placement = require(block, "withOrderPlacement", where);
  const json& execution = require(block, "withOrderExecution", where);
  if (!placement.is_boolean() || !execution.is_boolean())
    raise(Errc::malformed_json, where + " order flags must be booleans");
  sc.with_order_placement = placement.get<bool>();
  sc.with_order_execution = execution.get<bool>();
  if (block.contains("withPrint")) {
    if (!block["withPrint"].is_boolean())
      raise(Errc::malformed_json, where + " withPrint must be a boolean");
    sc.with_print = block["withPrint"].get<bool>();
  }
  if (block.contains("hiFrequencySubmitRate")) {
    const double rate = require_number(block["hiFrequencySubmitRate"], "hiFrequencySubmitRate");
    if (rate < 0.0 || rate > 1.0)
      raise(Errc::bad_rate, "hiFrequencySubmitRate must be within [0, 1]");
    sc.hi_frequency_submit_rate = rate;
  }
  if (block.contains("numStepAgents"))
    sc.num_step_agents = static_cast<int>(require_count(block["numStepAgents"], "numStepAgents", 1));

  static const std::set<std::string> known = {"sessionName",       "iterationSteps",
                                              "withOrderPlacement", "withOrderExecution",
                                              "withPrint",          "hiFrequencySubmitRate",
                                              "numStepAgents"};
  for (const auto& [key, value] : block.items()) {
    if (known.count(key) != 0) continue;
    logging::warn(where + ": ignoring unknown key '" + key + "'");
    sc.extras[key] = value;
  }
  return sc;
}

json random_spec_to_json(const RandomSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, UniformReal>) {
          return json{{"uniform", json::array({s.lo, s.hi})}};
        } else if constexpr (std::is_same_v<T, UniformInt>) {
          return json::array({s.lo, s.hi});
        } else {
          return json{{"expon", json::array({s.mean})}};
        }
      },
      spec.variant);
}

}  // namespace

const MarketConfig& SimulationConfig::market(const std::string& name) const {
  for (const auto& mc : markets)
    if (mc.name == name) return mc;
  raise(Errc::missing_key, "market '" + name + "' is not configured");
}

int SimulationConfig::market_index(const std::string& name) const {
  for (std::size_t i = 0; i < markets.size(); ++i)
    if (markets[i].name == name) return static_cast<int>(i);
  raise(Errc::missing_key, "market '" + name + "' is not configured");
}

SimulationConfig parse_config(const std::string& json_text, const ClassRegistry& registry) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(Errc::malformed_json, e.what());
  }
  if (!root.is_object()) raise(Errc::malformed_json, "top level must be an object");

  const json& sim = require(root, "simulation", "top level");
  if (!sim.is_object()) raise(Errc::malformed_json, "'simulation' must be an object");

  SimulationConfig config;

  const auto market_names = require_name_list(require(sim, "markets", "simulation"), "markets");
  const auto agent_names = require_name_list(require(sim, "agents", "simulation"), "agents");

  std::set<std::string> referenced;
  for (const auto& name : market_names) {
    if (!referenced.insert(name).second)
      raise(Errc::malformed_json, "block '" + name + "' referenced twice");
    config.markets.push_back(parse_market(name, require(root, name, "top level"), registry));
  }
  for (const auto& name : agent_names) {
    if (!referenced.insert(name).second)
      raise(Errc::malformed_json, "block '" + name + "' referenced twice");
    config.agent_groups.push_back(
        parse_agent_group(name, require(root, name, "top level"), registry));
  }
  for (const auto& group : config.agent_groups)
    for (const auto& market_name : group.markets)
      config.market_index(market_name);  // raises if the reference dangles

  const json& sessions = require(sim, "sessions", "simulation");
  if (!sessions.is_array() || sessions.empty())
    raise(Errc::malformed_json, "'sessions' must be a non-empty array");
  for (std::size_t i = 0; i < sessions.size(); ++i)
    config.sessions.push_back(parse_session(sessions[i], i));

  if (sim.contains("numStepAgents"))
    config.num_step_agents =
        static_cast<int>(require_count(sim["numStepAgents"], "numStepAgents", 1));

  static const std::set<std::string> sim_known = {"markets", "agents", "sessions",
                                                  "numStepAgents"};
  for (const auto& [key, value] : sim.items()) {
    if (sim_known.count(key) != 0) continue;
    logging::warn("simulation: ignoring unknown key '" + key + "'");
    config.simulation_extras[key] = value;
  }
  for (const auto& [key, value] : root.items()) {
    if (key == "simulation" || referenced.count(key) != 0) continue;
    logging::warn("ignoring unreferenced top-level block '" + key + "'");
    config.extras[key] = value;
  }
  return config;
}

SimulationConfig parse_config(const std::string& json_text) {
  return parse_config(json_text, builtin_registry());
}

json config_to_json(const SimulationConfig& config) {
  json root = json::object();
  json sim = json::object();

  json market_names = json::array();
  for (const auto& mc : config.markets) market_names.push_back(mc.name);
  sim["markets"] = market_names;

  json agent_names = json::array();
  for (const auto& gc : config.agent_groups) agent_names.push_back(gc.name);
  sim["agents"] = agent_names;

  json sessions = json::array();
  for (const auto& sc : config.sessions) {
    json s = json::object();
    s["sessionName"] = sc.name;
    s["iterationSteps"] = sc.iteration_steps;
    s["withOrderPlacement"] = sc.with_order_placement;
    s["withOrderExecution"] = sc.with_order_execution;
    s["withPrint"] = sc.with_print;
    if (sc.hi_frequency_submit_rate) s["hiFrequencySubmitRate"] = *sc.hi_frequency_submit_rate;
    if (sc.num_step_agents) s["numStepAgents"] = *sc.num_step_agents;
    for (const auto& [key, value] : sc.extras.items()) s[key] = value;
    sessions.push_back(s);
  }
  sim["sessions"] = sessions;
  if (config.num_step_agents != 1) sim["numStepAgents"] = config.num_step_agents;
  for (const auto& [key, value] : config.simulation_extras.items()) sim[key] = value;
  root["simulation"] = sim;

  for (const auto& mc : config.markets) {
    json block = json::object();
    block["class"] = mc.class_name;
    block["tickSize"] = mc.tick_size;
    block["marketPrice"] = mc.market_price;
    block["fundamentalPrice"] = mc.fundamental_price;
    for (const auto& [key, value] : mc.extras.items()) block[key] = value;
    root[mc.name] = block;
  }
  for (const auto& gc : config.agent_groups) {
    json block = json::object();
    block["class"] = gc.class_name;
    block["numAgents"] = gc.num_agents;
    json markets = json::array();
    for (const auto& name : gc.markets) markets.push_back(name);
    block["markets"] = markets;
    block["assetVolume"] = random_spec_to_json(gc.asset_volume);
    block["cashAmount"] = random_spec_to_json(gc.cash_amount);
    for (const auto& [key, spec] : gc.params) block[key] = random_spec_to_json(spec);
    for (const auto& [key, value] : gc.string_params) block[key] = value;
    for (const auto& [key, value] : gc.extras.items()) block[key] = value;
    root[gc.name] = block;
  }
  for (const auto& [key, value] : config.extras.items()) root[key] = value;
  return root;
}

std::string serialize_config(const SimulationConfig& config) {
  return config_to_json(config).dump(2);
}

}  // namespace marketforge
