#pragma once

#include <cstdint>
#include <optional>

namespace marketforge {

enum class Side { buy, sell };

inline Side opposite(Side s) { return s == Side::buy ? Side::sell : Side::buy; }

enum class OrderKind { limit, market };

// A priced, tick-quantized intent to trade. `id` is assigned by the market
// at submission and is the time-priority key; `price` is an integer tick
// count and meaningful for limit orders only.
struct Order {
  std::uint64_t id = 0;
  int agent_id = -1;
  int market_id = -1;
  Side side = Side::buy;
  OrderKind kind = OrderKind::limit;
  std::int64_t price = 0;
  std::int64_t volume = 1;
  long placed_at = -1;
  std::optional<long> ttl;
};

// A matched fill. `price` is the resting order's limit price, in ticks.
struct Execution {
  std::uint64_t buy_order_id = 0;
  std::uint64_t sell_order_id = 0;
  int buy_agent_id = -1;
  int sell_agent_id = -1;
  int market_id = -1;
  std::int64_t price = 0;
  std::int64_t volume = 0;
  long step = -1;

  bool operator==(const Execution&) const = default;
};

}  // namespace marketforge
