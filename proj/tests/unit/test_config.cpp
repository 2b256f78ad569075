#include <doctest.h>

#include "marketforge/config.hpp"
#include "marketforge/errors.hpp"
#include "marketforge/experiment.hpp"
#include "marketforge/registry.hpp"

using namespace marketforge;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io_failure;
}

}  // namespace

TEST_CASE("the baseline config parses to the documented structure") {
  const SimulationConfig config = ci2002_config();

  REQUIRE(config.markets.size() == 1);
  CHECK(config.markets[0].name == "Market");
  CHECK(config.markets[0].tick_size == 0.00001);
  CHECK(config.markets[0].market_price == 300.0);
  CHECK(config.markets[0].fundamental_price == 300.0);

  REQUIRE(config.agent_groups.size() == 1);
  const AgentGroupConfig& group = config.agent_groups[0];
  CHECK(group.class_name == "FCNAgent");
  CHECK(group.num_agents == 100);
  CHECK(group.markets == std::vector<std::string>{"Market"});
  CHECK(group.asset_volume == RandomSpec::constant(50));
  CHECK(group.cash_amount == RandomSpec::constant(10000));
  CHECK(group.params.at("fundamentalWeight") == RandomSpec::exponential(1.0));
  CHECK(group.params.at("chartWeight") == RandomSpec::exponential(0.0));
  CHECK(group.params.at("noiseWeight") == RandomSpec::exponential(1.0));
  CHECK(group.params.at("meanReversionTime") == RandomSpec::uniform_real(50, 100));
  CHECK(group.params.at("noiseScale") == RandomSpec::constant(0.001));
  CHECK(group.params.at("timeWindowSize") == RandomSpec::uniform_int(100, 200));
  CHECK(group.params.at("orderMargin") == RandomSpec::uniform_real(0.0, 0.1));

  REQUIRE(config.sessions.size() == 2);
  CHECK(config.sessions[0].name == "0");
  CHECK(config.sessions[0].iteration_steps == 100);
  CHECK(config.sessions[0].with_order_placement);
  CHECK_FALSE(config.sessions[0].with_order_execution);
  CHECK(config.sessions[0].hi_frequency_submit_rate == 1.0);
  CHECK(config.sessions[1].name == "1");
  CHECK(config.sessions[1].iteration_steps == 500);
  CHECK(config.sessions[1].with_order_execution);
  CHECK(config.num_step_agents == 1);
}

TEST_CASE("round trip: serialize then parse gives the identical structure") {
  SimulationConfig config = ci2002_config();
  CHECK(parse_config(serialize_config(config)) == config);

  config = sweep_template_config(750);
  CHECK(parse_config(serialize_config(config)) == config);

  // unknown keys survive the trip
  std::string text = serialize_config(ci2002_config());
  nlohmann::json j = nlohmann::json::parse(text);
  j["Market"]["outstandingShares"] = 12345;
  j["simulation"]["futureFlag"] = true;
  j["EventBlock"] = {{"class", "SomeEvent"}};
  const SimulationConfig with_extras = parse_config(j.dump());
  CHECK(with_extras.markets[0].extras.at("outstandingShares") == 12345);
  CHECK(with_extras.simulation_extras.at("futureFlag") == true);
  CHECK(with_extras.extras.contains("EventBlock"));
  CHECK(parse_config(serialize_config(with_extras)) == with_extras);
}

TEST_CASE("field-shape inference and its error cases") {
  nlohmann::json j = nlohmann::json::parse(serialize_config(ci2002_config()));

  SUBCASE("bare integer pair on an integer-semantic field") {
    j["FCNAgents"]["timeWindowSize"] = nlohmann::json::array({100, 200});
    CHECK(parse_config(j.dump()).agent_groups[0].params.at("timeWindowSize") ==
          RandomSpec::uniform_int(100, 200));
  }
  SUBCASE("bare pair with a fractional endpoint falls back to a real range") {
    j["FCNAgents"]["timeWindowSize"] = nlohmann::json::array({100.5, 200.0});
    CHECK(parse_config(j.dump()).agent_groups[0].params.at("timeWindowSize") ==
          RandomSpec::uniform_real(100.5, 200.0));
  }
  SUBCASE("three-element array is a parse error") {
    j["FCNAgents"]["orderMargin"] = nlohmann::json::array({0.0, 0.1, 0.2});
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::malformed_json);
  }
  SUBCASE("reversed range") {
    j["FCNAgents"]["orderMargin"] = nlohmann::json::array({0.2, 0.1});
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_range);
  }
  SUBCASE("unsupported entity name") {
    j["FCNAgents"]["orderMargin"] = {{"normal", nlohmann::json::array({0.0, 1.0})}};
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::malformed_json);
  }
  SUBCASE("negative exponential mean") {
    j["FCNAgents"]["noiseWeight"] = {{"expon", nlohmann::json::array({-1.0})}};
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_range);
  }
}

TEST_CASE("structural parse errors carry the right codes") {
  CHECK(code_of([] { parse_config("not json"); }) == Errc::malformed_json);
  CHECK(code_of([] { parse_config("{}"); }) == Errc::missing_key);

  nlohmann::json j = nlohmann::json::parse(serialize_config(ci2002_config()));
  SUBCASE("referenced block missing") {
    j.erase("Market");
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::missing_key);
  }
  SUBCASE("unregistered class") {
    j["FCNAgents"]["class"] = "NoSuchAgent";
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::unknown_class);
  }
  SUBCASE("market class used as an agent") {
    j["FCNAgents"]["class"] = "Market";
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::unknown_class);
  }
  SUBCASE("zero agents") {
    j["FCNAgents"]["numAgents"] = 0;
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_range);
  }
  SUBCASE("submit rate above one") {
    j["simulation"]["sessions"][0]["hiFrequencySubmitRate"] = 1.5;
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_rate);
  }
  SUBCASE("negative iteration steps") {
    j["simulation"]["sessions"][0]["iterationSteps"] = -5;
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_range);
  }
  SUBCASE("dangling market reference") {
    j["FCNAgents"]["markets"] = nlohmann::json::array({"Ghost"});
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::missing_key);
  }
  SUBCASE("nonpositive tick size") {
    j["Market"]["tickSize"] = 0.0;
    CHECK(code_of([&] { parse_config(j.dump()); }) == Errc::bad_range);
  }
}

TEST_CASE("registry resolves builtins and rejects duplicates") {
  const ClassRegistry& registry = builtin_registry();
  CHECK(registry.resolve("Market").kind == ClassRegistry::Kind::market);
  CHECK(registry.resolve("FCNAgent").kind == ClassRegistry::Kind::agent);
  CHECK(registry.resolve("DeepAgent").kind == ClassRegistry::Kind::agent);
  CHECK(code_of([&] { registry.resolve("NoSuchAgent"); }) == Errc::unknown_class);

  ClassRegistry copy = registry;
  copy.register_event_class("FundamentalPriceShock");
  CHECK(copy.resolve("FundamentalPriceShock").kind == ClassRegistry::Kind::event);
  CHECK(code_of([&] { copy.register_event_class("FundamentalPriceShock"); }) ==
        Errc::duplicate_registration);
  CHECK(code_of([&] { copy.register_agent_class("Market", AgentClassInfo{}); }) ==
        Errc::duplicate_registration);
}
