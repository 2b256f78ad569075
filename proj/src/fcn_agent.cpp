#include "marketforge/fcn_agent.hpp"

#include <algorithm>
#include <cmath>

#include "marketforge/errors.hpp"
#include "marketforge/registry.hpp"

namespace marketforge {

FcnMarketView FcnMarketView::of(const Market& market) {
  FcnMarketView view;
  view.market_id = market.id();
  view.tick_size = market.tick_size();
  view.market_price = market.market_price();
  view.fundamental_price = market.fundamental_price();
  view.best_bid = market.best_bid();
  view.best_ask = market.best_ask();
  view.price_history = market.price_history();
  return view;
}

double fundamental_factor(double tau_star, double p_star, double p_t) {
  return std::log(p_star / p_t) / tau_star;
}

double chartist_factor(long tau, std::span<const std::int64_t> price_history) {
  const long returns_available = static_cast<long>(price_history.size()) - 1;
  const long window = std::min(tau, returns_available);
  if (window < 1) return 0.0;
  double sum = 0.0;
  const std::size_t n = price_history.size();
  for (long j = 0; j < window; ++j) {
    const double newer = static_cast<double>(price_history[n - 1 - j]);
    const double older = static_cast<double>(price_history[n - 2 - j]);
    sum += std::log(newer / older);
  }
  return sum / static_cast<double>(window);
}

double noise_factor(double sigma, Rng& rng) { return rng.normal(sigma); }

double expected_return(const FcnParams& params, double f, double c, double n) {
  const double total = params.w_fundamental + params.w_chart + params.w_noise;
  return (params.w_fundamental * f + params.w_chart * c + params.w_noise * n) / total;
}

double expected_price(double p_t, double r_hat, long tau) {
  return p_t * std::exp(r_hat * static_cast<double>(tau));
}

std::optional<Order> decide_order(const FcnParams& params, const FcnMarketView& view, Rng& rng,
                                  PricingMode mode, std::optional<long> ttl) {
  const double p_t = static_cast<double>(view.market_price);
  const double f = fundamental_factor(params.tau_star, static_cast<double>(view.fundamental_price), p_t);
  const double c = chartist_factor(params.tau, view.price_history);
  const double n = noise_factor(params.noise_scale, rng);
  const double r_hat = expected_return(params, f, c, n);
  const double p_hat = expected_price(p_t, r_hat, params.tau);  // tick units

  if (p_hat == p_t) return std::nullopt;

  Order order;
  order.market_id = view.market_id;
  order.kind = OrderKind::limit;
  order.volume = 1;
  order.ttl = ttl;

  double price_ticks;
  if (p_hat > p_t) {
    order.side = Side::buy;
    price_ticks = p_hat * (1.0 - params.order_margin);
    if (mode == PricingMode::literal && view.best_bid)
      price_ticks = std::min(price_ticks, static_cast<double>(*view.best_bid));
  } else {
    order.side = Side::sell;
    price_ticks = p_hat * (1.0 + params.order_margin);
    if (mode == PricingMode::literal && view.best_ask)
      price_ticks = std::max(price_ticks, static_cast<double>(*view.best_ask));
  }
  order.price = quantize_price(price_ticks * view.tick_size, order.side, view.tick_size);
  return order;
}

namespace {

const RandomSpec& require_param(const AgentGroupConfig& group, const std::string& key) {
  const auto it = group.params.find(key);
  if (it == group.params.end())
    raise(Errc::missing_key, "agent group '" + group.name + "' needs '" + key + "'");
  return it->second;
}

}  // namespace

FcnParams sample_fcn_params(const AgentGroupConfig& group, Rng& rng) {
  const RandomSpec& w_f = require_param(group, "fundamentalWeight");
  const RandomSpec& w_c = require_param(group, "chartWeight");
  const RandomSpec& w_n = require_param(group, "noiseWeight");

  FcnParams params;
  for (int attempt = 0;; ++attempt) {
    params.w_fundamental = sample(w_f, rng);
    params.w_chart = sample(w_c, rng);
    params.w_noise = sample(w_n, rng);
    if (params.w_fundamental < 0 || params.w_chart < 0 || params.w_noise < 0)
      raise(Errc::bad_range, "factor weights must be nonnegative");
    if (params.w_fundamental + params.w_chart + params.w_noise > 0) break;
    if (attempt >= 99)
      raise(Errc::degenerate_weights, "all factor weights sampled 0 in 100 attempts");
  }

  params.tau_star = sample(require_param(group, "meanReversionTime"), rng);
  if (!(params.tau_star >= 1.0)) raise(Errc::bad_range, "meanReversionTime must be >= 1");
  params.tau = std::llround(sample(require_param(group, "timeWindowSize"), rng));
  if (params.tau < 1) raise(Errc::bad_range, "timeWindowSize must be >= 1");
  params.order_margin = sample(require_param(group, "orderMargin"), rng);
  if (params.order_margin < 0.0 || params.order_margin >= 1.0)
    raise(Errc::bad_range, "orderMargin must lie in [0, 1)");
  params.noise_scale = sample(require_param(group, "noiseScale"), rng);
  if (params.noise_scale < 0.0) raise(Errc::bad_range, "noiseScale must be >= 0");
  return params;
}

FcnAgent::FcnAgent(FcnParams params, int agent_id, std::string group, std::vector<int> market_ids,
                   std::size_t n_markets, PricingMode mode, std::optional<long> order_ttl)
    : Agent(agent_id, std::move(group), std::move(market_ids), n_markets),
      params_(params),
      mode_(mode),
      order_ttl_(order_ttl) {}

std::unique_ptr<Agent> FcnAgent::create(const AgentBuildContext& ctx) {
  FcnParams params = sample_fcn_params(ctx.group, ctx.run_rng);

  PricingMode mode = PricingMode::uncapped;
  if (const auto it = ctx.group.string_params.find("pricingMode");
      it != ctx.group.string_params.end()) {
    if (it->second == "literal") {
      mode = PricingMode::literal;
    } else if (it->second != "uncapped") {
      raise(Errc::bad_range, "pricingMode must be 'uncapped' or 'literal'");
    }
  }

  std::optional<long> ttl;
  if (const auto it = ctx.group.params.find("orderTimeLength"); it != ctx.group.params.end()) {
    const long sampled = std::llround(sample(it->second, ctx.run_rng));
    if (sampled < 1) raise(Errc::bad_range, "orderTimeLength must be >= 1");
    ttl = sampled;
  }

  auto agent = std::make_unique<FcnAgent>(params, ctx.agent_id, ctx.group.name, ctx.market_ids,
                                          ctx.markets.size(), mode, ttl);
  AgentState& state = agent->state();
  state.cash_unit = ctx.cash_unit;
  state.cash_units = std::llround(sample(ctx.group.cash_amount, ctx.run_rng) / ctx.cash_unit);
  const std::int64_t shares = std::llround(sample(ctx.group.asset_volume, ctx.run_rng));
  for (const int market_id : ctx.market_ids) state.position[market_id] = shares;
  state.initial_cash_units = state.cash_units;
  state.initial_position = state.position;
  return agent;
}

std::vector<Order> FcnAgent::on_turn(const TurnView& view, Rng& run_rng) {
  auto order = decide_order(params_, FcnMarketView::of(view.market), run_rng, mode_, order_ttl_);
  if (!order) return {};
  order->agent_id = state().agent_id;
  return {*order};
}

}  // namespace marketforge
