#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "marketforge/rng.hpp"

namespace marketforge::nn {

inline constexpr double kLayerNormEpsilon = 1e-5;

// All learnable parameters of the predictor: an LSTM (gate rows stacked
// [input, forget, cell, output]) followed by linear -> layer norm -> ReLU
// -> linear producing a single logit.
struct NetParams {
  Eigen::MatrixXd w_input;   // 4H x I
  Eigen::MatrixXd w_hidden;  // 4H x H
  Eigen::VectorXd bias;      // 4H
  Eigen::MatrixXd head_w1;   // H x H
  Eigen::VectorXd head_b1;   // H
  Eigen::VectorXd ln_gamma;  // H
  Eigen::VectorXd ln_beta;   // H
  Eigen::MatrixXd head_w2;   // 1 x H
  Eigen::VectorXd head_b2;   // 1

  int input_size() const { return static_cast<int>(w_input.cols()); }
  int hidden_size() const { return static_cast<int>(w_hidden.cols()); }

  static NetParams zeros(int input, int hidden);
  // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per weight matrix, zero
  // biases except the forget gate at +1, layer norm at identity.
  static NetParams init(int input, int hidden, Rng& rng);
};

// Gradients share the parameter layout exactly.
using NetGrads = NetParams;

// Flat traversal of all parameters in a fixed documented order: w_input,
// w_hidden, bias, head_w1, head_b1, ln_gamma, ln_beta, head_w2, head_b2.
struct ParamChunk {
  const char* name;
  double* data;
  Eigen::Index size;
};
std::vector<ParamChunk> param_chunks(NetParams& params);
Eigen::Index param_count(const NetParams& params);

// Parameter snapshot with a shape header, for fixtures and reproducibility.
nlohmann::json params_to_json(const NetParams& params);
NetParams params_from_json(const nlohmann::json& j);

// Activations cached for backpropagation. Batched layout: every matrix is
// hidden x batch, one column per sample.
struct LstmCache {
  std::vector<Eigen::MatrixXd> x;  // T of I x B
  std::vector<Eigen::MatrixXd> gate_i, gate_f, gate_g, gate_o;
  std::vector<Eigen::MatrixXd> cell, cell_tanh, hidden;
  Eigen::MatrixXd h_final;
};

struct HeadCache {
  Eigen::MatrixXd h;                // H x B input
  Eigen::MatrixXd lin1;             // pre-norm
  Eigen::MatrixXd normed;           // (lin1 - mean) / std
  Eigen::RowVectorXd inv_std;       // per column
  Eigen::MatrixXd scaled;           // gamma * normed + beta (pre-ReLU)
  Eigen::MatrixXd relu;
  Eigen::RowVectorXd logits;        // 1 x B
};

// Batched core: `sequences` holds B sequences of equal length T, each T x I.
LstmCache lstm_forward_batch(const NetParams& params,
                             std::span<const Eigen::MatrixXd> sequences);
HeadCache head_forward_batch(const NetParams& params, const Eigen::MatrixXd& h);

struct BceBatch {
  double mean_loss;
  Eigen::RowVectorXd dlogits;  // gradient of the mean loss
};
BceBatch bce_loss_batch(const Eigen::RowVectorXd& logits, std::span<const int> labels);

NetGrads backward_batch(const NetParams& params, const LstmCache& lstm, const HeadCache& head,
                        const Eigen::RowVectorXd& dlogits);

// Single-sequence surface (batch of one).
std::pair<Eigen::VectorXd, LstmCache> lstm_forward(const NetParams& params,
                                                   const Eigen::MatrixXd& sequence);
double head_forward(const NetParams& params, const Eigen::VectorXd& h);

struct BceResult {
  double loss;
  double dlogit;  // sigmoid(logit) - label
};
BceResult bce_loss(double logit, int label);

NetGrads backward(const NetParams& params, const LstmCache& lstm, const HeadCache& head,
                  double dlogit);

// Adaptive-moment optimizer with bias correction.
struct AdamState {
  NetParams first_moment;
  NetParams second_moment;
  long step = 0;
  double learning_rate = 1e-3;
  double decay1 = 0.9;
  double decay2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(const NetParams& params);
};
void adam_step(NetParams& params, const NetGrads& grads, AdamState& state);

// Central-difference audit of the analytic gradient of the whole network
// loss; returns the max relative error over all parameters.
double finite_difference_check(const NetParams& params, const Eigen::MatrixXd& sequence,
                               int label, double epsilon = 1e-5);

}  // namespace marketforge::nn
