#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marketforge/order.hpp"

namespace marketforge {

// Rounds a raw currency price onto the tick grid, conservatively: buys
// round down, sells round up, so an agent never pays more / receives less
// than intended. Values within 1e-6 ticks of a grid point snap to it
// (absorbs the division's representation error). Result is at least 1 tick.
std::int64_t quantize_price(double raw, Side side, double tick_size);

// One row of the per-step market log. Prices are integer ticks here;
// serialization converts to currency via tick_size.
struct StepLogRecord {
  long step = 0;
  std::string session;
  int market_id = 0;
  double tick_size = 1.0;
  std::int64_t market_price = 0;
  std::int64_t fundamental_price = 0;
  std::optional<std::int64_t> best_bid;
  std::optional<std::int64_t> best_ask;
  std::int64_t executed_volume = 0;
  long execution_count = 0;
};

// Continuous double auction market: tick-quantized limit order book with
// price-time priority. All book prices are integer tick counts; currency
// appears only at I/O boundaries. Single-owner mutable state.
class Market {
 public:
  Market(int id, std::string name, double tick_size, std::int64_t market_price,
         std::int64_t fundamental_price);

  int id() const { return id_; }
  const std::string& name() const { return name_; }
  double tick_size() const { return tick_size_; }
  long time() const { return time_; }
  std::int64_t market_price() const { return market_price_; }
  std::int64_t fundamental_price() const { return fundamental_price_; }

  std::optional<std::int64_t> best_bid() const;
  std::optional<std::int64_t> best_ask() const;
  // (best_bid + best_ask) / 2 in ticks, absent unless both quotes exist
  std::optional<double> mid_price() const;

  // Matches the incoming order against the opposite side while it crosses;
  // each fill happens at the resting order's price, oldest-first within a
  // level. With execution disabled, limit orders rest unmatched and market
  // orders are rejected. Returns the fills in order. The caller's order is
  // stamped with its serial id and placement step; its volume is left as
  // submitted (the book tracks the remainder).
  std::vector<Execution> submit_order(Order& order, bool execution_enabled);

  // Removes every resting order whose ttl has elapsed (placed_at + ttl <= now).
  std::vector<std::uint64_t> expire_orders(long now);

  // Snapshot of the step in progress; the caller advances the clock
  // separately with advance_step().
  StepLogRecord step_summary(const std::string& session_name) const;

  // Records the step's closing price and mid into the histories, resets the
  // per-step counters and moves the clock forward.
  void advance_step();

  // Closing market price of each completed step, in ticks.
  std::span<const std::int64_t> price_history() const { return price_history_; }
  // Closing mid of each completed step; one-sided/empty books fall back to
  // the market price so the series has no gaps.
  std::span<const double> mid_history() const { return mid_history_; }

  std::size_t resting_order_count() const;
  // Bids best-first then asks best-first, FIFO within each level.
  std::vector<Order> resting_orders() const;

 private:
  template <typename Book>
  std::vector<Execution> match(Order& incoming, Book& opposite, bool is_buy);

  int id_;
  std::string name_;
  double tick_size_;
  std::int64_t market_price_;
  std::int64_t fundamental_price_;
  long time_ = 0;
  std::uint64_t next_order_id_ = 1;

  std::map<std::int64_t, std::deque<Order>, std::greater<std::int64_t>> bids_;
  std::map<std::int64_t, std::deque<Order>> asks_;

  std::int64_t executed_volume_step_ = 0;
  long execution_count_step_ = 0;

  std::vector<std::int64_t> price_history_;
  std::vector<double> mid_history_;
};

}  // namespace marketforge
