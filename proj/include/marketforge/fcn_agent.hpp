#pragma once

#include <memory>
#include <optional>
#include <span>

#include "marketforge/agent.hpp"
#include "marketforge/config.hpp"
#include "marketforge/rng.hpp"

namespace marketforge {

struct AgentBuildContext;

// Per-agent stylized-trader weights, sampled once at construction.
struct FcnParams {
  double w_fundamental = 0.0;
  double w_chart = 0.0;
  double w_noise = 0.0;
  double tau_star = 1.0;     // mean-reversion time, steps
  long tau = 1;              // chart window, steps
  double order_margin = 0.0; // k, fraction in [0, 1)
  double noise_scale = 0.0;  // sigma
};

// How Eq. (6)/(7) order prices treat the standing quotes. The literal
// min/max cap keeps limit orders from ever crossing the spread, so no
// pure-limit-order run could trade; uncapped is the default and the cap
// stays available behind the pricingMode config flag.
enum class PricingMode { uncapped, literal };

// What a stylized agent reads off the market at its turn. Prices in ticks;
// the history is the per-step close series ending at t-1.
struct FcnMarketView {
  int market_id = 0;
  double tick_size = 1.0;
  std::int64_t market_price = 0;
  std::int64_t fundamental_price = 0;
  std::optional<std::int64_t> best_bid;
  std::optional<std::int64_t> best_ask;
  std::span<const std::int64_t> price_history;

  static FcnMarketView of(const Market& market);
};

// F = (1/tau*) ln(p*/p); ticks cancel in the ratio.
double fundamental_factor(double tau_star, double p_star, double p_t);

// Mean log return over the last min(tau, available) returns; 0 with fewer
// than two recorded prices.
double chartist_factor(long tau, std::span<const std::int64_t> price_history);

// One draw from N(0, sigma^2).
double noise_factor(double sigma, Rng& rng);

// Weighted blend of the three factors.
double expected_return(const FcnParams& params, double f, double c, double n);

// p_hat = p_t * exp(r_hat * tau); same unit as p_t.
double expected_price(double p_t, double r_hat, long tau);

// Full decision: computes the factors, picks the side from the sign of
// p_hat - p_t (exact tie abstains), prices the limit order with margin k
// and quantizes it. Volume is 1.
std::optional<Order> decide_order(const FcnParams& params, const FcnMarketView& view, Rng& rng,
                                  PricingMode mode = PricingMode::uncapped,
                                  std::optional<long> ttl = std::nullopt);

// Samples FcnParams for one agent of the group, resampling all three
// weights (at most 100 tries) if they come out identically zero.
FcnParams sample_fcn_params(const AgentGroupConfig& group, Rng& rng);

class FcnAgent : public Agent {
 public:
  FcnAgent(FcnParams params, int agent_id, std::string group, std::vector<int> market_ids,
           std::size_t n_markets, PricingMode mode = PricingMode::uncapped,
           std::optional<long> order_ttl = std::nullopt);

  static std::unique_ptr<Agent> create(const AgentBuildContext& ctx);

  const char* class_name() const override { return "FCNAgent"; }
  std::vector<Order> on_turn(const TurnView& view, Rng& run_rng) override;

  const FcnParams& params() const { return params_; }

 private:
  FcnParams params_;
  PricingMode mode_;
  std::optional<long> order_ttl_;
};

}  // namespace marketforge
