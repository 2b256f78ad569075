#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "marketforge/agent.hpp"
#include "marketforge/config.hpp"
#include "marketforge/market.hpp"

namespace marketforge {

// Everything a factory needs to build one agent of a group. Parameter
// sampling draws from `run_rng` (the single run stream); agents that need a
// private generator seed it from `child_seed`.
struct AgentBuildContext {
  const AgentGroupConfig& group;
  int agent_id;
  std::vector<int> market_ids;          // resolved indices of group.markets
  const std::vector<Market>& markets;   // all simulator markets
  double cash_unit;                     // currency per cash unit
  Rng& run_rng;
  std::uint64_t child_seed;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(const AgentBuildContext&)>;
using MarketFactory = std::function<Market(const MarketConfig&, int market_id)>;

struct AgentClassInfo {
  AgentFactory factory;
  // parameter fields this class recognizes; int_params get UniformInt
  // inference for bare two-element arrays, string_params hold plain strings
  std::set<std::string> real_params;
  std::set<std::string> int_params;
  std::set<std::string> string_params;
};

struct MarketClassInfo {
  MarketFactory factory;
};

// Name -> constructor handle behind the config's "class" keys. Built-ins:
// "Market", "FCNAgent", "DeepAgent". Names are shared across kinds, so a
// duplicate registration in any kind is an error.
class ClassRegistry {
 public:
  enum class Kind { agent, market, event };

  struct Resolved {
    Kind kind;
    const AgentClassInfo* agent = nullptr;
    const MarketClassInfo* market = nullptr;
  };

  void register_agent_class(const std::string& name, AgentClassInfo info);
  void register_market_class(const std::string& name, MarketClassInfo info);
  // Stub: events are registered by name only; no event is exercised here.
  void register_event_class(const std::string& name);

  bool contains(const std::string& name) const;
  Resolved resolve(const std::string& name) const;

 private:
  void check_new(const std::string& name) const;

  std::map<std::string, AgentClassInfo> agents_;
  std::map<std::string, MarketClassInfo> markets_;
  std::set<std::string> events_;
};

// Registry with the built-in classes. Copy it to add user classes.
const ClassRegistry& builtin_registry();

}  // namespace marketforge
