#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "marketforge/market.hpp"
#include "marketforge/order.hpp"
#include "marketforge/rng.hpp"

namespace marketforge {

// Cash is held as an integer count of `cash_unit` currency (the run's
// smallest tick value), so balance bookkeeping and conservation checks are
// exact. Positions are integer share counts per market.
struct AgentState {
  int agent_id = -1;
  double cash_unit = 1.0;
  std::int64_t cash_units = 0;
  std::int64_t initial_cash_units = 0;
  std::vector<std::int64_t> position;
  std::vector<std::int64_t> initial_position;

  double cash() const { return static_cast<double>(cash_units) * cash_unit; }
};

// Settles one fill on this agent's side of the trade. `price_multiplier`
// converts the market's ticks into cash units (tick_size / cash_unit, an
// exact integer by construction). Negative cash is permitted.
inline void apply_execution(AgentState& state, const Execution& exec, Side side,
                            std::int64_t price_multiplier) {
  const std::int64_t cost = exec.price * exec.volume * price_multiplier;
  if (side == Side::buy) {
    state.cash_units -= cost;
    state.position[exec.market_id] += exec.volume;
  } else {
    state.cash_units += cost;
    state.position[exec.market_id] -= exec.volume;
  }
}

// What an agent sees when the runner polls it.
struct TurnView {
  const Market& market;
  bool order_placement_enabled = true;
  bool order_execution_enabled = true;
};

// Trader contract. Decision logic draws from the shared run generator;
// agents with private generators seed them from a per-agent child seed.
class Agent {
 public:
  Agent(int agent_id, std::string group, std::vector<int> market_ids, std::size_t n_markets) {
    state_.agent_id = agent_id;
    state_.position.assign(n_markets, 0);
    state_.initial_position.assign(n_markets, 0);
    group_ = std::move(group);
    market_ids_ = std::move(market_ids);
  }
  virtual ~Agent() = default;

  virtual const char* class_name() const = 0;

  // Zero or more orders for the viewed market.
  virtual std::vector<Order> on_turn(const TurnView& view, Rng& run_rng) = 0;

  AgentState& state() { return state_; }
  const AgentState& state() const { return state_; }
  const std::string& group() const { return group_; }
  const std::vector<int>& market_ids() const { return market_ids_; }

 private:
  AgentState state_;
  std::string group_;
  std::vector<int> market_ids_;
};

}  // namespace marketforge
