#include <doctest.h>

#include <set>

#include "marketforge/errors.hpp"
#include "marketforge/market.hpp"
#include "marketforge/rng.hpp"
#include "support/naive_matcher.hpp"

using namespace marketforge;

namespace {

Market make_market() { return Market(0, "Market", 1e-5, 30000000, 30000000); }

Order limit(Side side, std::int64_t price, std::int64_t volume = 1, int agent = 0) {
  Order order;
  order.market_id = 0;
  order.agent_id = agent;
  order.side = side;
  order.kind = OrderKind::limit;
  order.price = price;
  order.volume = volume;
  return order;
}

Order market_order(Side side, std::int64_t volume = 1, int agent = 0) {
  Order order;
  order.market_id = 0;
  order.agent_id = agent;
  order.side = side;
  order.kind = OrderKind::market;
  order.volume = volume;
  return order;
}

}  // namespace

TEST_CASE("price quantization rounds conservatively per side") {
  CHECK(quantize_price(300.000014, Side::buy, 1e-5) == 30000001);
  CHECK(quantize_price(300.0, Side::sell, 1e-5) == 30000000);  // exact multiple is fixed
  CHECK(quantize_price(300.0, Side::buy, 1e-5) == 30000000);
  CHECK(quantize_price(300.000014, Side::sell, 1e-5) == 30000002);
  CHECK(quantize_price(0.25, Side::sell, 0.1) == 3);
  CHECK(quantize_price(0.25, Side::buy, 0.1) == 2);
  CHECK(quantize_price(1e-9, Side::buy, 1e-5) == 1);  // floor clamps to one tick
  CHECK_THROWS_AS(quantize_price(0.0, Side::buy, 1e-5), Error);
  CHECK_THROWS_AS(quantize_price(-3.0, Side::sell, 1e-5), Error);
}

TEST_CASE("crossing buy fills at the resting price") {
  Market market = make_market();
  Order ask = limit(Side::sell, 30000002);
  CHECK(market.submit_order(ask, true).empty());

  Order buy = limit(Side::buy, 30000005);
  const auto fills = market.submit_order(buy, true);
  REQUIRE(fills.size() == 1);
  CHECK(fills[0].price == 30000002);
  CHECK(fills[0].volume == 1);
  CHECK(fills[0].buy_order_id == buy.id);
  CHECK(fills[0].sell_order_id == ask.id);
  CHECK(market.resting_order_count() == 0);
  CHECK(market.market_price() == 30000002);
}

TEST_CASE("the same order rests when execution is disabled, crossing the book") {
  Market market = make_market();
  Order ask = limit(Side::sell, 30000002);
  market.submit_order(ask, false);
  Order buy = limit(Side::buy, 30000005);
  CHECK(market.submit_order(buy, false).empty());
  CHECK(market.best_bid() == 30000005);
  CHECK(market.best_ask() == 30000002);  // crossed book is legal without execution
  CHECK(market.resting_order_count() == 2);
}

TEST_CASE("non-crossing buy rests with no fills") {
  Market market = make_market();
  Order ask = limit(Side::sell, 30000010);
  market.submit_order(ask, true);
  Order buy = limit(Side::buy, 30000001);
  CHECK(market.submit_order(buy, true).empty());
  CHECK(market.best_bid() == 30000001);
  CHECK(market.best_ask() == 30000010);
}

TEST_CASE("equal-price resting orders fill oldest first") {
  Market market = make_market();
  Order first = limit(Side::sell, 30000002, 1, 1);
  Order second = limit(Side::sell, 30000002, 1, 2);
  market.submit_order(first, true);
  market.submit_order(second, true);
  Order buy = limit(Side::buy, 30000002, 1, 3);
  const auto fills = market.submit_order(buy, true);
  REQUIRE(fills.size() == 1);
  CHECK(fills[0].sell_order_id == first.id);
}

TEST_CASE("market orders need execution and a counterparty") {
  Market market = make_market();
  Order no_counterparty = market_order(Side::buy);
  CHECK_THROWS_AS(market.submit_order(no_counterparty, true), Error);

  Order ask = limit(Side::sell, 30000004);
  market.submit_order(ask, true);
  Order rejected = market_order(Side::buy);
  CHECK_THROWS_AS(market.submit_order(rejected, false), Error);

  Order accepted = market_order(Side::buy);
  const auto fills = market.submit_order(accepted, true);
  REQUIRE(fills.size() == 1);
  CHECK(fills[0].price == 30000004);
}

TEST_CASE("partial fills leave the remainder resting") {
  Market market = make_market();
  Order ask = limit(Side::sell, 30000002, 2);
  market.submit_order(ask, true);
  Order buy = limit(Side::buy, 30000006, 5);
  const auto fills = market.submit_order(buy, true);
  REQUIRE(fills.size() == 1);
  CHECK(fills[0].volume == 2);
  CHECK(market.best_ask() == std::nullopt);
  CHECK(market.best_bid() == 30000006);  // 3 units rest
  const auto resting = market.resting_orders();
  REQUIRE(resting.size() == 1);
  CHECK(resting[0].volume == 3);
  CHECK(buy.volume == 5);  // the caller's copy keeps the submitted volume
}

TEST_CASE("quotes and mid price") {
  Market market = make_market();
  CHECK(market.best_bid() == std::nullopt);
  CHECK(market.best_ask() == std::nullopt);
  CHECK(market.mid_price() == std::nullopt);

  Order bid = limit(Side::buy, 299);
  market.submit_order(bid, true);
  CHECK(market.best_bid() == 299);
  CHECK(market.mid_price() == std::nullopt);  // one-sided book has no mid

  Order ask = limit(Side::sell, 301);
  market.submit_order(ask, true);
  CHECK(market.mid_price() == 300.0);
}

TEST_CASE("ttl expiry is inclusive at placed_at + ttl") {
  Market market = make_market();
  for (long now = 0; now < 10; ++now) market.advance_step();  // clock at 10
  Order order = limit(Side::buy, 100);
  order.ttl = 5;
  market.submit_order(order, true);

  Order forever = limit(Side::buy, 90);
  market.submit_order(forever, true);

  for (long now = 10; now < 15; ++now) {
    CHECK(market.expire_orders(now).empty());
  }
  const auto cancelled = market.expire_orders(15);
  REQUIRE(cancelled.size() == 1);
  CHECK(cancelled[0] == order.id);
  CHECK(market.resting_order_count() == 1);  // the ttl-free order never expires
}

TEST_CASE("step summary reflects the step's executions and resets on advance") {
  Market market = make_market();
  const StepLogRecord quiet = market.step_summary("0");
  CHECK(quiet.executed_volume == 0);
  CHECK(quiet.execution_count == 0);
  CHECK(quiet.market_price == 30000000);

  Order ask = limit(Side::sell, 30000002);
  market.submit_order(ask, true);
  Order buy = limit(Side::buy, 30000002);
  market.submit_order(buy, true);
  const StepLogRecord active = market.step_summary("0");
  CHECK(active.executed_volume == 1);
  CHECK(active.execution_count == 1);
  CHECK(active.market_price == 30000002);

  market.advance_step();
  const StepLogRecord next = market.step_summary("0");
  CHECK(next.executed_volume == 0);
  CHECK(next.step == 1);
  CHECK(next.market_price == 30000002);  // unchanged on no-trade steps
  REQUIRE(market.price_history().size() == 1);
  CHECK(market.price_history()[0] == 30000002);
}

TEST_CASE("engine matches the naive reference on random streams") {
  Rng rng(2024);
  for (int stream = 0; stream < 100; ++stream) {
    Market market = make_market();
    testing::NaiveBook naive(0);
    long now = 0;

    for (int i = 0; i < 60; ++i) {
      const Side side = rng.uniform01() < 0.5 ? Side::buy : Side::sell;
      const bool use_market =
          rng.uniform01() < 0.15 &&
          (side == Side::buy ? market.best_ask().has_value() : market.best_bid().has_value());
      Order order;
      order.market_id = 0;
      order.agent_id = i;
      order.side = side;
      order.volume = rng.uniform_int(1, 4);
      if (use_market) {
        order.kind = OrderKind::market;
      } else {
        order.kind = OrderKind::limit;
        order.price = 30000000 + rng.uniform_int(-40, 40);
        if (rng.uniform01() < 0.3) order.ttl = rng.uniform_int(1, 10);
      }

      Order engine_order = order;
      const auto engine_fills = market.submit_order(engine_order, true);
      const auto naive_fills = naive.submit(order, true, now);
      REQUIRE(naive_fills.has_value());
      CHECK(engine_fills == *naive_fills);

      // the no-cross invariant holds after every execution-enabled submit
      if (market.best_bid() && market.best_ask()) CHECK(*market.best_bid() < *market.best_ask());

      if (rng.uniform01() < 0.25) {
        auto engine_cancelled = market.expire_orders(now);
        std::sort(engine_cancelled.begin(), engine_cancelled.end());
        CHECK(engine_cancelled == naive.expire(now));
        market.advance_step();
        ++now;
      }
    }

    const auto engine_resting = market.resting_orders();
    const auto naive_resting = naive.resting_orders();
    REQUIRE(engine_resting.size() == naive_resting.size());
    for (std::size_t k = 0; k < engine_resting.size(); ++k) {
      CHECK(engine_resting[k].id == naive_resting[k].id);
      CHECK(engine_resting[k].price == naive_resting[k].price);
      CHECK(engine_resting[k].volume == naive_resting[k].volume);
    }
  }
}

TEST_CASE("order validation") {
  Market market = make_market();
  Order wrong_market = limit(Side::buy, 100);
  wrong_market.market_id = 7;
  CHECK_THROWS_AS(market.submit_order(wrong_market, true), Error);
  Order zero_volume = limit(Side::buy, 100, 0);
  CHECK_THROWS_AS(market.submit_order(zero_volume, true), Error);
  Order free_lunch = limit(Side::buy, 0);
  CHECK_THROWS_AS(market.submit_order(free_lunch, true), Error);
}
