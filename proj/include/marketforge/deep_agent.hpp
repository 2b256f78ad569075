#pragma once

#include <optional>
#include <span>
#include <vector>

#include "marketforge/agent.hpp"
#include "marketforge/neural.hpp"

namespace marketforge {

struct AgentBuildContext;

// Predictor geometry and training schedule. The window and horizon are both
// 100 steps; a dataset is usable once it has 150 samples (the last 100 of
// which become the chronological holdout).
inline constexpr long kWindowSteps = 100;
inline constexpr long kHorizonSteps = 100;
inline constexpr int kFeatureColumns = 2;  // market price and mid price
inline constexpr int kHiddenSize = 32;
inline constexpr std::size_t kHoldoutSize = 100;
inline constexpr std::size_t kMinTrainingSamples = 150;
inline constexpr double kGateThreshold = 0.51;
inline constexpr int kMaxEpochs = 20;
inline constexpr std::size_t kBatchSize = 32;
inline constexpr double kEarlyStopLoss = 0.2;
inline constexpr long kRetryTurns = 100;
// A deep order works for as long as its forecast covers, then expires.
inline constexpr long kDeepOrderTtl = kHorizonSteps;

// One supervised example: a 100-step window of (price, mid) log-ratios
// against the window's closing market price, labeled 1 iff the price 100
// steps past the window end exceeds the price at the window end.
struct WindowSample {
  Eigen::MatrixXd features;  // kWindowSteps x kFeatureColumns
  int label = 0;
  long anchor_step = 0;
};

struct Predictor {
  nn::NetParams params;
  double holdout_accuracy = 0.0;
  bool gate_passed = false;  // holdout_accuracy > kGateThreshold, strict
  long trained_at = -1;
};

struct TrainingReport {
  int agent_id = -1;
  long trained_at = -1;
  std::size_t train_size = 0;
  double holdout_accuracy = 0.0;
  bool gate_passed = false;
  // Latest step any training label referenced; must precede trained_at.
  long max_label_step = -1;
};

// Log-ratio features for the window ending just before `end` (exclusive).
Eigen::MatrixXd window_features(std::span<const std::int64_t> price_history,
                                std::span<const double> mid_history, std::size_t end);

// One sample per anchor; empty until the history reaches window + horizon.
std::vector<WindowSample> build_dataset(std::span<const std::int64_t> price_history,
                                        std::span<const double> mid_history);

// Splits chronologically (last 100 samples held out), trains by mini-batch
// Adam with early stopping, and admits the model only if holdout accuracy
// beats the gate. Below kMinTrainingSamples no training happens and the
// gate fails.
Predictor train_and_gate(const std::vector<WindowSample>& samples, std::uint64_t child_seed);

bool predict_up(const Predictor& predictor, std::span<const std::int64_t> price_history,
                std::span<const double> mid_history);

// Gated trading step: a resting limit order of 1 unit at the current
// market price, toward the predicted side. Abstains when the position
// already sits at the clamp bound or when execution is off (a resting
// order could not fill before expiring). Spread-crossing market orders
// lose the half-spread on every fill in this book, which inverts the
// profit structure; resting at the last traded price earns it instead.
std::optional<Order> deep_decide_order(const Predictor& predictor, const Market& market,
                                       std::int64_t position, bool execution_enabled);

class DeepAgent : public Agent {
 public:
  DeepAgent(int agent_id, std::string group, std::vector<int> market_ids, std::size_t n_markets,
            std::uint64_t child_seed);

  static std::unique_ptr<Agent> create(const AgentBuildContext& ctx);

  const char* class_name() const override { return "DeepAgent"; }
  std::vector<Order> on_turn(const TurnView& view, Rng& run_rng) override;

  const std::optional<Predictor>& predictor() const { return predictor_; }
  std::span<const TrainingReport> reports() const { return reports_; }

 private:
  // The single order this agent may have working in the book. Together
  // with the at-bound abstention this keeps the position clamp airtight:
  // a new order is emitted only when no order is live, and only toward a
  // side the position can absorb.
  struct WorkingOrder {
    Side side;
    long placed_at;
    std::int64_t position_at_placement;
  };
  bool working_order_live(const Market& market) const;

  std::uint64_t child_seed_;
  std::optional<Predictor> predictor_;
  std::optional<WorkingOrder> working_;
  long attempt_count_ = 0;
  long turns_since_attempt_ = 0;
  std::vector<TrainingReport> reports_;
};

}  // namespace marketforge
