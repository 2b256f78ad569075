#include "marketforge/neural.hpp"

#include <cmath>

#include "marketforge/errors.hpp"

namespace marketforge::nn {

namespace {

Eigen::MatrixXd stable_sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform_real(-bound, bound);
}

}  // namespace

NetParams NetParams::zeros(int input, int hidden) {
  NetParams p;
  p.w_input = Eigen::MatrixXd::Zero(4 * hidden, input);
  p.w_hidden = Eigen::MatrixXd::Zero(4 * hidden, hidden);
  p.bias = Eigen::VectorXd::Zero(4 * hidden);
  p.head_w1 = Eigen::MatrixXd::Zero(hidden, hidden);
  p.head_b1 = Eigen::VectorXd::Zero(hidden);
  p.ln_gamma = Eigen::VectorXd::Zero(hidden);
  p.ln_beta = Eigen::VectorXd::Zero(hidden);
  p.head_w2 = Eigen::MatrixXd::Zero(1, hidden);
  p.head_b2 = Eigen::VectorXd::Zero(1);
  return p;
}

NetParams NetParams::init(int input, int hidden, Rng& rng) {
  NetParams p = zeros(input, hidden);
  fill_uniform(p.w_input, 1.0 / std::sqrt(static_cast<double>(input)), rng);
  fill_uniform(p.w_hidden, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  p.bias.segment(hidden, hidden).setOnes();  // forget gate starts open
  fill_uniform(p.head_w1, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  p.ln_gamma.setOnes();
  fill_uniform(p.head_w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  return p;
}

std::vector<ParamChunk> param_chunks(NetParams& p) {
  return {
      {"w_input", p.w_input.data(), p.w_input.size()},
      {"w_hidden", p.w_hidden.data(), p.w_hidden.size()},
      {"bias", p.bias.data(), p.bias.size()},
      {"head_w1", p.head_w1.data(), p.head_w1.size()},
      {"head_b1", p.head_b1.data(), p.head_b1.size()},
      {"ln_gamma", p.ln_gamma.data(), p.ln_gamma.size()},
      {"ln_beta", p.ln_beta.data(), p.ln_beta.size()},
      {"head_w2", p.head_w2.data(), p.head_w2.size()},
      {"head_b2", p.head_b2.data(), p.head_b2.size()},
  };
}

Eigen::Index param_count(const NetParams& params) {
  Eigen::Index n = 0;
  for (const auto& chunk : param_chunks(const_cast<NetParams&>(params))) n += chunk.size;
  return n;
}

nlohmann::json params_to_json(const NetParams& params) {
  auto& p = const_cast<NetParams&>(params);
  nlohmann::json layout = nlohmann::json::array();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(param_count(params)));
  for (const auto& chunk : param_chunks(p)) {
    layout.push_back(nlohmann::json::array({chunk.name, chunk.size}));
    values.insert(values.end(), chunk.data, chunk.data + chunk.size);
  }
  nlohmann::json j;
  j["input_size"] = params.input_size();
  j["hidden_size"] = params.hidden_size();
  j["layout"] = layout;
  j["values"] = values;
  return j;
}

NetParams params_from_json(const nlohmann::json& j) {
  NetParams p = NetParams::zeros(j.at("input_size").get<int>(), j.at("hidden_size").get<int>());
  const auto values = j.at("values").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != param_count(p))
    raise(Errc::shape_mismatch, "parameter snapshot has the wrong value count");
  std::size_t offset = 0;
  for (const auto& chunk : param_chunks(p)) {
    std::copy(values.begin() + offset, values.begin() + offset + chunk.size, chunk.data);
    offset += static_cast<std::size_t>(chunk.size);
  }
  return p;
}

LstmCache lstm_forward_batch(const NetParams& params,
                             std::span<const Eigen::MatrixXd> sequences) {
  const int hidden = params.hidden_size();
  const int input = params.input_size();
  const auto batch = static_cast<Eigen::Index>(sequences.size());
  if (batch == 0) raise(Errc::shape_mismatch, "empty batch");
  const Eigen::Index steps = sequences[0].rows();
  if (steps < 1) raise(Errc::shape_mismatch, "sequence must have at least one step");
  for (const auto& seq : sequences) {
    if (seq.rows() != steps || seq.cols() != input)
      raise(Errc::shape_mismatch, "sequences must share shape T x I");
    if (!seq.allFinite()) raise(Errc::non_finite_input, "sequence contains non-finite values");
  }

  LstmCache cache;
  cache.x.reserve(steps);
  cache.gate_i.reserve(steps);
  cache.gate_f.reserve(steps);
  cache.gate_g.reserve(steps);
  cache.gate_o.reserve(steps);
  cache.cell.reserve(steps);
  cache.cell_tanh.reserve(steps);
  cache.hidden.reserve(steps);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(hidden, batch);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(hidden, batch);

  for (Eigen::Index t = 0; t < steps; ++t) {
    Eigen::MatrixXd x_t(input, batch);
    for (Eigen::Index b = 0; b < batch; ++b) x_t.col(b) = sequences[b].row(t).transpose();

    Eigen::MatrixXd z = params.w_input * x_t + params.w_hidden * h;
    z.colwise() += params.bias;

    Eigen::MatrixXd gi = stable_sigmoid(z.topRows(hidden));
    Eigen::MatrixXd gf = stable_sigmoid(z.middleRows(hidden, hidden));
    Eigen::MatrixXd gg = z.middleRows(2 * hidden, hidden).array().tanh().matrix();
    Eigen::MatrixXd go = stable_sigmoid(z.middleRows(3 * hidden, hidden));

    c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    Eigen::MatrixXd ct = c.array().tanh().matrix();
    h = go.cwiseProduct(ct);

    cache.x.push_back(std::move(x_t));
    cache.gate_i.push_back(std::move(gi));
    cache.gate_f.push_back(std::move(gf));
    cache.gate_g.push_back(std::move(gg));
    cache.gate_o.push_back(std::move(go));
    cache.cell.push_back(c);
    cache.cell_tanh.push_back(std::move(ct));
    cache.hidden.push_back(h);
  }
  cache.h_final = h;
  return cache;
}

HeadCache head_forward_batch(const NetParams& params, const Eigen::MatrixXd& h) {
  const int hidden = params.hidden_size();
  if (h.rows() != hidden) raise(Errc::shape_mismatch, "head input must have H rows");

  HeadCache cache;
  cache.h = h;
  cache.lin1 = params.head_w1 * h;
  cache.lin1.colwise() += params.head_b1;

  const Eigen::RowVectorXd mean = cache.lin1.colwise().mean();
  Eigen::MatrixXd centered = cache.lin1.rowwise() - mean;
  const Eigen::RowVectorXd variance = centered.array().square().colwise().mean();
  cache.inv_std = (variance.array() + kLayerNormEpsilon).rsqrt();
  cache.normed = centered.array().rowwise() * cache.inv_std.array();

  cache.scaled = (cache.normed.array().colwise() * params.ln_gamma.array()).colwise() +
                 params.ln_beta.array();
  cache.relu = cache.scaled.cwiseMax(0.0);
  cache.logits = params.head_w2 * cache.relu;
  cache.logits.array() += params.head_b2(0);
  return cache;
}

BceBatch bce_loss_batch(const Eigen::RowVectorXd& logits, std::span<const int> labels) {
  const auto batch = logits.size();
  if (batch != static_cast<Eigen::Index>(labels.size()))
    raise(Errc::shape_mismatch, "logit/label counts differ");
  BceBatch out;
  out.dlogits.resize(batch);
  double total = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto [loss, dlogit] = bce_loss(logits(b), labels[b]);
    total += loss;
    out.dlogits(b) = dlogit / static_cast<double>(batch);
  }
  out.mean_loss = total / static_cast<double>(batch);
  return out;
}

BceResult bce_loss(double logit, int label) {
  const double y = static_cast<double>(label);
  // max(z,0) - z*y + ln(1 + e^-|z|): never exponentiates a positive argument
  const double loss = std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
  const double sig = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                                  : std::exp(logit) / (1.0 + std::exp(logit));
  return {loss, sig - y};
}

NetGrads backward_batch(const NetParams& params, const LstmCache& lstm, const HeadCache& head,
                        const Eigen::RowVectorXd& dlogits) {
  const int hidden = params.hidden_size();
  NetGrads grads = NetParams::zeros(params.input_size(), hidden);

  // head: linear2
  grads.head_w2 = dlogits * head.relu.transpose();
  grads.head_b2(0) = dlogits.sum();
  Eigen::MatrixXd d_relu = params.head_w2.transpose() * dlogits;

  // ReLU
  Eigen::MatrixXd d_scaled =
      (head.scaled.array() > 0.0).select(d_relu, Eigen::MatrixXd::Zero(d_relu.rows(), d_relu.cols()));

  // layer norm scale/shift
  grads.ln_gamma = d_scaled.cwiseProduct(head.normed).rowwise().sum();
  grads.ln_beta = d_scaled.rowwise().sum();
  Eigen::MatrixXd d_normed = d_scaled.array().colwise() * params.ln_gamma.array();

  // normalization Jacobian, per column:
  // dx = inv_std * (dxhat - mean(dxhat) - xhat * mean(dxhat . xhat))
  const Eigen::RowVectorXd mean_d = d_normed.colwise().mean();
  const Eigen::RowVectorXd mean_dx = d_normed.cwiseProduct(head.normed).colwise().mean();
  Eigen::MatrixXd d_lin1 =
      (d_normed.rowwise() - mean_d) - (head.normed.array().rowwise() * mean_dx.array()).matrix();
  d_lin1 = d_lin1.array().rowwise() * head.inv_std.array();

  // linear1
  grads.head_w1 = d_lin1 * head.h.transpose();
  grads.head_b1 = d_lin1.rowwise().sum();
  Eigen::MatrixXd d_h = params.head_w1.transpose() * d_lin1;

  // backpropagation through time, full depth
  const auto steps = static_cast<Eigen::Index>(lstm.x.size());
  const auto batch = d_h.cols();
  Eigen::MatrixXd d_c = Eigen::MatrixXd::Zero(hidden, batch);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Eigen::MatrixXd& gi = lstm.gate_i[t];
    const Eigen::MatrixXd& gf = lstm.gate_f[t];
    const Eigen::MatrixXd& gg = lstm.gate_g[t];
    const Eigen::MatrixXd& go = lstm.gate_o[t];
    const Eigen::MatrixXd& ct = lstm.cell_tanh[t];
    const Eigen::MatrixXd c_prev =
        t > 0 ? lstm.cell[t - 1] : Eigen::MatrixXd::Zero(hidden, batch);
    const Eigen::MatrixXd h_prev =
        t > 0 ? lstm.hidden[t - 1] : Eigen::MatrixXd::Zero(hidden, batch);

    Eigen::MatrixXd d_o = d_h.cwiseProduct(ct);
    d_c += d_h.cwiseProduct(go).cwiseProduct(
        (1.0 - ct.array().square()).matrix());

    Eigen::MatrixXd d_i = d_c.cwiseProduct(gg);
    Eigen::MatrixXd d_f = d_c.cwiseProduct(c_prev);
    Eigen::MatrixXd d_g = d_c.cwiseProduct(gi);

    Eigen::MatrixXd dz(4 * hidden, batch);
    dz.topRows(hidden) = d_i.array() * gi.array() * (1.0 - gi.array());
    dz.middleRows(hidden, hidden) = d_f.array() * gf.array() * (1.0 - gf.array());
    dz.middleRows(2 * hidden, hidden) = d_g.array() * (1.0 - gg.array().square());
    dz.middleRows(3 * hidden, hidden) = d_o.array() * go.array() * (1.0 - go.array());

    grads.w_input.noalias() += dz * lstm.x[t].transpose();
    grads.w_hidden.noalias() += dz * h_prev.transpose();
    grads.bias += dz.rowwise().sum();

    d_h = params.w_hidden.transpose() * dz;
    d_c = d_c.cwiseProduct(gf);
  }
  return grads;
}

std::pair<Eigen::VectorXd, LstmCache> lstm_forward(const NetParams& params,
                                                   const Eigen::MatrixXd& sequence) {
  LstmCache cache = lstm_forward_batch(params, std::span<const Eigen::MatrixXd>(&sequence, 1));
  return {cache.h_final.col(0), std::move(cache)};
}

double head_forward(const NetParams& params, const Eigen::VectorXd& h) {
  return head_forward_batch(params, h).logits(0);
}

NetGrads backward(const NetParams& params, const LstmCache& lstm, const HeadCache& head,
                  double dlogit) {
  Eigen::RowVectorXd d(1);
  d(0) = dlogit;
  return backward_batch(params, lstm, head, d);
}

AdamState AdamState::for_params(const NetParams& params) {
  AdamState state;
  state.first_moment = NetParams::zeros(params.input_size(), params.hidden_size());
  state.second_moment = NetParams::zeros(params.input_size(), params.hidden_size());
  return state;
}

void adam_step(NetParams& params, const NetGrads& grads, AdamState& state) {
  auto p_chunks = param_chunks(params);
  auto g_chunks = param_chunks(const_cast<NetGrads&>(grads));
  auto m_chunks = param_chunks(state.first_moment);
  auto v_chunks = param_chunks(state.second_moment);

  ++state.step;
  const double correction1 = 1.0 - std::pow(state.decay1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.decay2, static_cast<double>(state.step));

  for (std::size_t k = 0; k < p_chunks.size(); ++k) {
    if (p_chunks[k].size != g_chunks[k].size)
      raise(Errc::shape_mismatch, "gradient shapes do not mirror the parameters");
    double* p = p_chunks[k].data;
    const double* g = g_chunks[k].data;
    double* m = m_chunks[k].data;
    double* v = v_chunks[k].data;
    for (Eigen::Index i = 0; i < p_chunks[k].size; ++i) {
      m[i] = state.decay1 * m[i] + (1.0 - state.decay1) * g[i];
      v[i] = state.decay2 * v[i] + (1.0 - state.decay2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

namespace {

double network_loss(const NetParams& params, const Eigen::MatrixXd& sequence, int label) {
  const auto [h, lstm] = lstm_forward(params, sequence);
  const double logit = head_forward(params, h);
  return bce_loss(logit, label).loss;
}

}  // namespace

double finite_difference_check(const NetParams& params, const Eigen::MatrixXd& sequence,
                               int label, double epsilon) {
  const auto [h, lstm] = lstm_forward(params, sequence);
  const HeadCache head = head_forward_batch(params, h);
  const double dlogit = bce_loss(head.logits(0), label).dlogit;
  NetGrads analytic = backward(params, lstm, head, dlogit);

  NetParams probe = params;
  auto probe_chunks = param_chunks(probe);
  auto grad_chunks = param_chunks(analytic);

  double worst = 0.0;
  for (std::size_t k = 0; k < probe_chunks.size(); ++k) {
    for (Eigen::Index i = 0; i < probe_chunks[k].size; ++i) {
      double& value = probe_chunks[k].data[i];
      const double saved = value;
      value = saved + epsilon;
      const double up = network_loss(probe, sequence, label);
      value = saved - epsilon;
      const double down = network_loss(probe, sequence, label);
      value = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic_value = grad_chunks[k].data[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic_value), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic_value) / scale);
    }
  }
  return worst;
}

}  // namespace marketforge::nn
