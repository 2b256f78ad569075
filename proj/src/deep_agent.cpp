#include "marketforge/deep_agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "marketforge/errors.hpp"
#include "marketforge/registry.hpp"

namespace marketforge {

Eigen::MatrixXd window_features(std::span<const std::int64_t> price_history,
                                std::span<const double> mid_history, std::size_t end) {
  const auto window = static_cast<std::size_t>(kWindowSteps);
  Eigen::MatrixXd features(kWindowSteps, kFeatureColumns);
  const double p_end = static_cast<double>(price_history[end - 1]);
  for (std::size_t i = 0; i < window; ++i) {
    const std::size_t idx = end - window + i;
    features(static_cast<Eigen::Index>(i), 0) =
        std::log(static_cast<double>(price_history[idx]) / p_end);
    features(static_cast<Eigen::Index>(i), 1) = std::log(mid_history[idx] / p_end);
  }
  return features;
}

std::vector<WindowSample> build_dataset(std::span<const std::int64_t> price_history,
                                        std::span<const double> mid_history) {
  std::vector<WindowSample> samples;
  const auto length = static_cast<long>(price_history.size());
  if (length < kWindowSteps + kHorizonSteps) return samples;
  samples.reserve(static_cast<std::size_t>(length - kWindowSteps - kHorizonSteps + 1));
  for (long anchor = kWindowSteps - 1; anchor + kHorizonSteps < length; ++anchor) {
    WindowSample sample;
    sample.anchor_step = anchor;
    sample.features =
        window_features(price_history, mid_history, static_cast<std::size_t>(anchor + 1));
    sample.label = price_history[static_cast<std::size_t>(anchor + kHorizonSteps)] >
                           price_history[static_cast<std::size_t>(anchor)]
                       ? 1
                       : 0;
    samples.push_back(std::move(sample));
  }
  return samples;
}

namespace {

double holdout_accuracy(const nn::NetParams& params, std::span<const WindowSample> holdout) {
  std::vector<Eigen::MatrixXd> sequences;
  sequences.reserve(holdout.size());
  for (const auto& sample : holdout) sequences.push_back(sample.features);
  const nn::LstmCache lstm = nn::lstm_forward_batch(params, sequences);
  const nn::HeadCache head = nn::head_forward_batch(params, lstm.h_final);
  long correct = 0;
  for (Eigen::Index b = 0; b < head.logits.size(); ++b) {
    const int predicted = head.logits(b) > 0.0 ? 1 : 0;
    if (predicted == holdout[static_cast<std::size_t>(b)].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(holdout.size());
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace

Predictor train_and_gate(const std::vector<WindowSample>& samples, std::uint64_t child_seed) {
  Predictor predictor;
  predictor.params = nn::NetParams::zeros(kFeatureColumns, kHiddenSize);
  if (samples.size() < kMinTrainingSamples) return predictor;

  Rng rng(child_seed);
  predictor.params = nn::NetParams::init(kFeatureColumns, kHiddenSize, rng);
  nn::AdamState optimizer = nn::AdamState::for_params(predictor.params);

  const std::size_t train_count = samples.size() - kHoldoutSize;
  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), 0);

  std::vector<Eigen::MatrixXd> batch_sequences;
  std::vector<int> batch_labels;
  for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
    shuffle_indices(order, rng);
    double loss_sum = 0.0;
    std::size_t batch_count = 0;
    for (std::size_t start = 0; start < train_count; start += kBatchSize) {
      const std::size_t stop = std::min(start + kBatchSize, train_count);
      batch_sequences.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_sequences.push_back(samples[order[i]].features);
        batch_labels.push_back(samples[order[i]].label);
      }
      const nn::LstmCache lstm = nn::lstm_forward_batch(predictor.params, batch_sequences);
      const nn::HeadCache head = nn::head_forward_batch(predictor.params, lstm.h_final);
      const nn::BceBatch bce = nn::bce_loss_batch(head.logits, batch_labels);
      const nn::NetGrads grads = nn::backward_batch(predictor.params, lstm, head, bce.dlogits);
      nn::adam_step(predictor.params, grads, optimizer);
      loss_sum += bce.mean_loss;
      ++batch_count;
    }
    if (loss_sum / static_cast<double>(batch_count) < kEarlyStopLoss) break;
  }

  predictor.holdout_accuracy =
      holdout_accuracy(predictor.params, std::span(samples).subspan(train_count));
  predictor.gate_passed = predictor.holdout_accuracy > kGateThreshold;
  return predictor;
}

bool predict_up(const Predictor& predictor, std::span<const std::int64_t> price_history,
                std::span<const double> mid_history) {
  const Eigen::MatrixXd features =
      window_features(price_history, mid_history, price_history.size());
  const auto [h, lstm] = nn::lstm_forward(predictor.params, features);
  return nn::head_forward(predictor.params, h) > 0.0;
}

std::optional<Order> deep_decide_order(const Predictor& predictor, const Market& market,
                                       std::int64_t position, bool execution_enabled) {
  if (!predictor.gate_passed) return std::nullopt;
  if (!execution_enabled) return std::nullopt;
  if (market.price_history().size() < static_cast<std::size_t>(kWindowSteps)) return std::nullopt;

  const bool up = predict_up(predictor, market.price_history(), market.mid_history());
  Order order;
  order.market_id = market.id();
  order.kind = OrderKind::limit;
  order.price = market.market_price();  // rest at the last traded price
  order.volume = 1;
  order.ttl = kDeepOrderTtl;
  if (up) {
    if (position >= 1) return std::nullopt;
    order.side = Side::buy;
  } else {
    if (position <= -1) return std::nullopt;
    order.side = Side::sell;
  }
  return order;
}

DeepAgent::DeepAgent(int agent_id, std::string group, std::vector<int> market_ids,
                     std::size_t n_markets, std::uint64_t child_seed)
    : Agent(agent_id, std::move(group), std::move(market_ids), n_markets),
      child_seed_(child_seed) {}

std::unique_ptr<Agent> DeepAgent::create(const AgentBuildContext& ctx) {
  auto agent = std::make_unique<DeepAgent>(ctx.agent_id, ctx.group.name, ctx.market_ids,
                                           ctx.markets.size(), ctx.child_seed);
  AgentState& state = agent->state();
  state.cash_unit = ctx.cash_unit;
  state.cash_units = std::llround(sample(ctx.group.cash_amount, ctx.run_rng) / ctx.cash_unit);
  const std::int64_t shares = std::llround(sample(ctx.group.asset_volume, ctx.run_rng));
  if (shares < -1 || shares > 1)
    raise(Errc::bad_range, "deep agents hold positions in {-1, 0, +1}");
  for (const int market_id : ctx.market_ids) state.position[market_id] = shares;
  state.initial_cash_units = state.cash_units;
  state.initial_position = state.position;
  return agent;
}

bool DeepAgent::working_order_live(const Market& market) const {
  if (!working_) return false;
  // Volume-1 orders fill whole, and fills are the only thing that moves a
  // deep agent's position, so a changed position means the order is gone.
  if (state().position[market.id()] != working_->position_at_placement) return false;
  // Expiry runs at the end of each step; an order expiring this step can
  // still fill this step, so it counts as live until the clock passes it.
  return working_->placed_at + kDeepOrderTtl >= market.time();
}

std::vector<Order> DeepAgent::on_turn(const TurnView& view, Rng&) {
  const Market& market = view.market;
  ++turns_since_attempt_;

  const bool gated = predictor_ && predictor_->gate_passed;
  if (!gated) {
    const auto length = static_cast<long>(market.price_history().size());
    const long available =
        length >= kWindowSteps + kHorizonSteps ? length - kWindowSteps - kHorizonSteps + 1 : 0;
    const bool due = attempt_count_ == 0 || turns_since_attempt_ >= kRetryTurns;
    if (available >= static_cast<long>(kMinTrainingSamples) && due) {
      const auto samples = build_dataset(market.price_history(), market.mid_history());
      predictor_ = train_and_gate(samples, derive_seed(child_seed_, static_cast<std::uint64_t>(
                                                                        attempt_count_)));
      predictor_->trained_at = market.time();
      reports_.push_back({state().agent_id, predictor_->trained_at,
                          samples.size() - kHoldoutSize, predictor_->holdout_accuracy,
                          predictor_->gate_passed,
                          samples.back().anchor_step + kHorizonSteps});
      ++attempt_count_;
      turns_since_attempt_ = 0;
    }
  }

  if (!predictor_ || !predictor_->gate_passed) return {};
  if (working_order_live(market)) return {};  // one working order at a time
  working_.reset();

  auto order = deep_decide_order(*predictor_, market, state().position[market.id()],
                                 view.order_execution_enabled);
  if (!order) return {};
  order->agent_id = state().agent_id;
  if (view.order_placement_enabled)
    working_ = WorkingOrder{order->side, market.time(), state().position[market.id()]};
  return {*order};
}

}  // namespace marketforge
