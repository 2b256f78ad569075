#include "marketforge/registry.hpp"

#include <cmath>

#include "marketforge/deep_agent.hpp"
#include "marketforge/errors.hpp"
#include "marketforge/fcn_agent.hpp"

namespace marketforge {

void ClassRegistry::check_new(const std::string& name) const {
  if (contains(name)) raise(Errc::duplicate_registration, "class '" + name + "' already registered");
}

void ClassRegistry::register_agent_class(const std::string& name, AgentClassInfo info) {
  check_new(name);
  agents_.emplace(name, std::move(info));
}

void ClassRegistry::register_market_class(const std::string& name, MarketClassInfo info) {
  check_new(name);
  markets_.emplace(name, std::move(info));
}

void ClassRegistry::register_event_class(const std::string& name) {
  check_new(name);
  events_.insert(name);
}

bool ClassRegistry::contains(const std::string& name) const {
  return agents_.count(name) != 0 || markets_.count(name) != 0 || events_.count(name) != 0;
}

ClassRegistry::Resolved ClassRegistry::resolve(const std::string& name) const {
  if (const auto it = agents_.find(name); it != agents_.end())
    return {Kind::agent, &it->second, nullptr};
  if (const auto it = markets_.find(name); it != markets_.end())
    return {Kind::market, nullptr, &it->second};
  if (events_.count(name) != 0) return {Kind::event, nullptr, nullptr};
  raise(Errc::unknown_class, "class '" + name + "' is not registered");
}

namespace {

Market make_market(const MarketConfig& config, int market_id) {
  const auto to_ticks = [&](double currency) {
    return static_cast<std::int64_t>(std::llround(currency / config.tick_size));
  };
  return Market(market_id, config.name, config.tick_size, to_ticks(config.market_price),
                to_ticks(config.fundamental_price));
}

ClassRegistry make_builtin_registry() {
  ClassRegistry registry;
  registry.register_market_class("Market", MarketClassInfo{make_market});

  AgentClassInfo fcn;
  fcn.factory = FcnAgent::create;
  fcn.real_params = {"fundamentalWeight", "chartWeight", "noiseWeight",
                     "meanReversionTime", "noiseScale",  "orderMargin"};
  fcn.int_params = {"timeWindowSize", "orderTimeLength"};
  fcn.string_params = {"pricingMode"};
  registry.register_agent_class("FCNAgent", std::move(fcn));

  AgentClassInfo deep;
  deep.factory = DeepAgent::create;
  registry.register_agent_class("DeepAgent", std::move(deep));
  return registry;
}

}  // namespace

const ClassRegistry& builtin_registry() {
  static const ClassRegistry registry = make_builtin_registry();
  return registry;
}

}  // namespace marketforge
