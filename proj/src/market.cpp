#include "marketforge/market.hpp"

#include <algorithm>
#include <cmath>

#include "marketforge/errors.hpp"

namespace marketforge {

std::int64_t quantize_price(double raw, Side side, double tick_size) {
  if (!(raw > 0.0)) raise(Errc::non_positive_price, "price must be positive");
  if (!(tick_size > 0.0)) raise(Errc::bad_range, "tick size must be positive");
  const double ratio = raw / tick_size;
  // snap tolerance: 1e-6 ticks, far above the ~1e-8 representation error at
  // our price scale and far below one tick
  const double ticks = side == Side::buy ? std::floor(ratio + 1e-6) : std::ceil(ratio - 1e-6);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(ticks));
}

Market::Market(int id, std::string name, double tick_size, std::int64_t market_price,
               std::int64_t fundamental_price)
    : id_(id),
      name_(std::move(name)),
      tick_size_(tick_size),
      market_price_(market_price),
      fundamental_price_(fundamental_price) {
  if (!(tick_size > 0.0)) raise(Errc::bad_range, "tick size must be positive");
  if (market_price < 1) raise(Errc::non_positive_price, "market price must be >= 1 tick");
  if (fundamental_price < 1) raise(Errc::non_positive_price, "fundamental price must be >= 1 tick");
}

std::optional<std::int64_t> Market::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<std::int64_t> Market::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

std::optional<double> Market::mid_price() const {
  const auto bid = best_bid();
  const auto ask = best_ask();
  if (!bid || !ask) return std::nullopt;
  return (static_cast<double>(*bid) + static_cast<double>(*ask)) / 2.0;
}

template <typename Book>
std::vector<Execution> Market::match(Order& incoming, Book& opposite, bool is_buy) {
  std::vector<Execution> fills;
  while (incoming.volume > 0 && !opposite.empty()) {
    auto level = opposite.begin();
    const std::int64_t level_price = level->first;
    if (incoming.kind == OrderKind::limit) {
      const bool crosses = is_buy ? incoming.price >= level_price : incoming.price <= level_price;
      if (!crosses) break;
    }
    Order& resting = level->second.front();
    const std::int64_t fill = std::min(incoming.volume, resting.volume);
    Execution exec;
    exec.buy_order_id = is_buy ? incoming.id : resting.id;
    exec.sell_order_id = is_buy ? resting.id : incoming.id;
    exec.buy_agent_id = is_buy ? incoming.agent_id : resting.agent_id;
    exec.sell_agent_id = is_buy ? resting.agent_id : incoming.agent_id;
    exec.market_id = id_;
    exec.price = level_price;  // fill at the resting order's price
    exec.volume = fill;
    exec.step = time_;
    fills.push_back(exec);

    incoming.volume -= fill;
    resting.volume -= fill;
    market_price_ = level_price;
    executed_volume_step_ += fill;
    ++execution_count_step_;

    if (resting.volume == 0) {
      level->second.pop_front();
      if (level->second.empty()) opposite.erase(level);
    }
  }
  return fills;
}

std::vector<Execution> Market::submit_order(Order& order, bool execution_enabled) {
  if (order.market_id != id_) raise(Errc::bad_order, "order addressed to a different market");
  if (order.volume < 1) raise(Errc::bad_order, "order volume must be >= 1");
  if (order.kind == OrderKind::limit && order.price < 1)
    raise(Errc::bad_order, "limit price must be >= 1 tick");

  order.id = next_order_id_++;
  order.placed_at = time_;
  Order working = order;

  if (!execution_enabled) {
    if (working.kind == OrderKind::market)
      raise(Errc::market_order_while_execution_disabled,
            "market orders need an execution-enabled session");
    // Rest without matching; the book may cross during a no-execution
    // session and resolves organically once execution turns on.
    auto& book_side = working.side == Side::buy ? bids_[working.price] : asks_[working.price];
    book_side.push_back(working);
    return {};
  }

  if (working.kind == OrderKind::market) {
    const bool counterparty = working.side == Side::buy ? !asks_.empty() : !bids_.empty();
    if (!counterparty)
      raise(Errc::market_order_no_counterparty, "no resting orders on the opposite side");
  }

  std::vector<Execution> fills = working.side == Side::buy ? match(working, asks_, true)
                                                           : match(working, bids_, false);

  // Unfilled limit remainder rests; market-order remainders never rest.
  if (working.volume > 0 && working.kind == OrderKind::limit) {
    auto& book_side = working.side == Side::buy ? bids_[working.price] : asks_[working.price];
    book_side.push_back(working);
  }
  return fills;
}

std::vector<std::uint64_t> Market::expire_orders(long now) {
  std::vector<std::uint64_t> cancelled;
  auto sweep = [&](auto& book) {
    for (auto level = book.begin(); level != book.end();) {
      auto& queue = level->second;
      for (auto it = queue.begin(); it != queue.end();) {
        if (it->ttl && it->placed_at + *it->ttl <= now) {
          cancelled.push_back(it->id);
          it = queue.erase(it);
        } else {
          ++it;
        }
      }
      level = queue.empty() ? book.erase(level) : std::next(level);
    }
  };
  sweep(bids_);
  sweep(asks_);
  return cancelled;
}

StepLogRecord Market::step_summary(const std::string& session_name) const {
  StepLogRecord rec;
  rec.step = time_;
  rec.session = session_name;
  rec.market_id = id_;
  rec.tick_size = tick_size_;
  rec.market_price = market_price_;
  rec.fundamental_price = fundamental_price_;
  rec.best_bid = best_bid();
  rec.best_ask = best_ask();
  rec.executed_volume = executed_volume_step_;
  rec.execution_count = execution_count_step_;
  return rec;
}

void Market::advance_step() {
  price_history_.push_back(market_price_);
  const auto mid = mid_price();
  mid_history_.push_back(mid ? *mid : static_cast<double>(market_price_));
  executed_volume_step_ = 0;
  execution_count_step_ = 0;
  ++time_;
}

std::size_t Market::resting_order_count() const {
  std::size_t n = 0;
  for (const auto& [price, queue] : bids_) n += queue.size();
  for (const auto& [price, queue] : asks_) n += queue.size();
  return n;
}

std::vector<Order> Market::resting_orders() const {
  std::vector<Order> out;
  out.reserve(resting_order_count());
  for (const auto& [price, queue] : bids_) out.insert(out.end(), queue.begin(), queue.end());
  for (const auto& [price, queue] : asks_) out.insert(out.end(), queue.begin(), queue.end());
  return out;
}

}  // namespace marketforge
