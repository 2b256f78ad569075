#pragma once

#include <memory>
#include <span>
#include <vector>

#include "marketforge/agent.hpp"
#include "marketforge/config.hpp"
#include "marketforge/deep_agent.hpp"
#include "marketforge/market.hpp"
#include "marketforge/registry.hpp"

namespace marketforge {

inline constexpr const char* kVersion = "0.1.0";

// The simulated world: markets plus heterogeneous agents behind the Agent
// contract. Strictly single-owner; concurrent experiments each build their
// own simulator.
struct Simulator {
  std::vector<Market> markets;
  std::vector<std::unique_ptr<Agent>> agents;
  double cash_unit = 1.0;                        // currency per cash unit
  std::vector<std::int64_t> price_multipliers;   // per market: tick_size / cash_unit
};

// Observation callbacks, invoked in a fixed order: session begin, then per
// step orders -> executions -> market step, then session end. A logger
// exception aborts the run.
class Logger {
 public:
  virtual ~Logger() = default;
  virtual void on_simulation_begin(const Simulator&) {}
  virtual void on_simulation_end(const Simulator&) {}
  virtual void on_session_begin(const SessionConfig&) {}
  virtual void on_session_end(const SessionConfig&) {}
  virtual void on_order(const Order&) {}
  virtual void on_execution(const Execution&) {}
  virtual void on_market_step(const StepLogRecord&) {}
};

// Retains only the per-step market records.
class MarketStepSaver : public Logger {
 public:
  void on_market_step(const StepLogRecord& record) override { records_.push_back(record); }
  std::span<const StepLogRecord> records() const { return records_; }

 private:
  std::vector<StepLogRecord> records_;
};

struct AgentSnapshot {
  int agent_id = -1;
  std::string group;
  std::string class_name;
  double cash_unit = 1.0;
  std::int64_t cash_units = 0;
  std::int64_t initial_cash_units = 0;
  std::vector<std::int64_t> position;
  std::vector<std::int64_t> initial_position;

  double cash() const { return static_cast<double>(cash_units) * cash_unit; }
  double initial_cash() const { return static_cast<double>(initial_cash_units) * cash_unit; }
};

struct RunResult {
  std::uint64_t seed = 0;
  double cash_unit = 1.0;
  std::vector<double> tick_sizes;
  std::vector<std::int64_t> price_multipliers;
  std::vector<std::int64_t> initial_prices;  // ticks, per market
  std::vector<std::int64_t> final_prices;
  std::vector<StepLogRecord> steps;
  std::vector<Execution> executions;
  std::vector<AgentSnapshot> agents;
  std::vector<TrainingReport> training_reports;
};

// Uniform draw of n_select distinct agent indices (without replacement);
// consumes exactly n_select generator draws.
std::vector<std::size_t> select_agents(Rng& rng, std::size_t n_select, std::size_t agent_count);

// Builds markets and agents from the config, sampling parameters from the
// given stream. Agent ids are assigned in group order.
Simulator build_simulator(const SimulationConfig& config, std::uint64_t seed, Rng& rng,
                          const ClassRegistry& registry = builtin_registry());

// Executes the sessions in order and returns complete logs and balances.
// Identical (config, seed) gives an identical result, bit for bit.
RunResult run(const SimulationConfig& config, std::uint64_t seed, Logger* logger = nullptr,
              const ClassRegistry& registry = builtin_registry());

}  // namespace marketforge
