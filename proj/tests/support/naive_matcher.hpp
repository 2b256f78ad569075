#pragma once

// Reference matcher for oracle-equivalence tests: a flat vector of resting
// orders scanned linearly for the best opposite quote on every fill. No
// shared code with the engine beyond the Order/Execution types.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "marketforge/order.hpp"

namespace marketforge::testing {

class NaiveBook {
 public:
  explicit NaiveBook(int market_id) : market_id_(market_id) {}

  // Mirrors Market::submit_order semantics, including the id stamping.
  // Returns std::nullopt when the order is rejected.
  std::optional<std::vector<Execution>> submit(Order order, bool execution_enabled, long now) {
    order.id = next_id_++;
    order.placed_at = now;

    if (!execution_enabled) {
      if (order.kind == OrderKind::market) return std::nullopt;
      resting_.push_back(order);
      return std::vector<Execution>{};
    }
    if (order.kind == OrderKind::market && !has_side(opposite(order.side)))
      return std::nullopt;

    std::vector<Execution> fills;
    while (order.volume > 0) {
      Order* best = best_opposite(order);
      if (best == nullptr) break;
      const std::int64_t volume = std::min(order.volume, best->volume);
      Execution exec;
      exec.buy_order_id = order.side == Side::buy ? order.id : best->id;
      exec.sell_order_id = order.side == Side::buy ? best->id : order.id;
      exec.buy_agent_id = order.side == Side::buy ? order.agent_id : best->agent_id;
      exec.sell_agent_id = order.side == Side::buy ? best->agent_id : order.agent_id;
      exec.market_id = market_id_;
      exec.price = best->price;
      exec.volume = volume;
      exec.step = now;
      fills.push_back(exec);
      order.volume -= volume;
      best->volume -= volume;
      last_price_ = best->price;
      if (best->volume == 0)
        resting_.erase(resting_.begin() + (best - resting_.data()));
    }
    if (order.volume > 0 && order.kind == OrderKind::limit) resting_.push_back(order);
    return fills;
  }

  std::vector<std::uint64_t> expire(long now) {
    std::vector<std::uint64_t> cancelled;
    std::vector<Order> kept;
    for (const Order& order : resting_) {
      if (order.ttl && order.placed_at + *order.ttl <= now) {
        cancelled.push_back(order.id);
      } else {
        kept.push_back(order);
      }
    }
    resting_ = std::move(kept);
    std::sort(cancelled.begin(), cancelled.end());
    return cancelled;
  }

  std::optional<std::int64_t> best_bid() const { return best_price(Side::buy); }
  std::optional<std::int64_t> best_ask() const { return best_price(Side::sell); }
  std::optional<std::int64_t> last_price() const { return last_price_; }

  // Sorted like Market::resting_orders(): bids best-first, then asks
  // best-first, FIFO (id order) within a price level.
  std::vector<Order> resting_orders() const {
    std::vector<Order> out = resting_;
    std::sort(out.begin(), out.end(), [](const Order& a, const Order& b) {
      if (a.side != b.side) return a.side == Side::buy;
      if (a.price != b.price) return a.side == Side::buy ? a.price > b.price : a.price < b.price;
      return a.id < b.id;
    });
    return out;
  }

 private:
  bool has_side(Side side) const {
    for (const Order& order : resting_)
      if (order.side == side) return true;
    return false;
  }

  std::optional<std::int64_t> best_price(Side side) const {
    std::optional<std::int64_t> best;
    for (const Order& order : resting_) {
      if (order.side != side) continue;
      if (!best || (side == Side::buy ? order.price > *best : order.price < *best))
        best = order.price;
    }
    return best;
  }

  // Best price on the other side that the incoming order crosses; ties on
  // price break toward the smallest id.
  Order* best_opposite(const Order& incoming) {
    Order* best = nullptr;
    for (Order& order : resting_) {
      if (order.side != opposite(incoming.side)) continue;
      if (incoming.kind == OrderKind::limit) {
        const bool crosses = incoming.side == Side::buy ? incoming.price >= order.price
                                                        : incoming.price <= order.price;
        if (!crosses) continue;
      }
      if (best == nullptr) {
        best = &order;
        continue;
      }
      const bool better = incoming.side == Side::buy
                              ? order.price < best->price ||
                                    (order.price == best->price && order.id < best->id)
                              : order.price > best->price ||
                                    (order.price == best->price && order.id < best->id);
      if (better) best = &order;
    }
    return best;
  }

  int market_id_;
  std::uint64_t next_id_ = 1;
  std::vector<Order> resting_;
  std::optional<std::int64_t> last_price_;
};

// Deterministic random order stream shared by the unit and acceptance
// equivalence tests. Market orders are only generated when a counterparty
// exists so both engines accept the same stream.
struct StreamEvent {
  Order order;
  bool advance_clock;
};

}  // namespace marketforge::testing
