// Copyright 2026 The Fedsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedsim/model/gru_lm.h"

#include <bit>
#include <cmath>
#include <string>

#include "fedsim/common/error.h"
#include "numeric/eigen_view.h"

namespace fedsim {
namespace {

using internal::ConstMatrixView;
using internal::RowMatrix;
using internal::View;

void RequireDim(int value, const char* what) {
  if (value <= 0) {
    Fail(ErrorCode::kConfig, std::string(what) + " must be positive, got " +
                                 std::to_string(value));
  }
}

Tensor2 UniformTensor(int rows, int cols, double scale, SeededRng& rng) {
  Tensor2 t(rows, cols);
  if (scale == 0.0) return t;
  for (double& v : t.values()) v = scale * (2.0 * rng.NextUniform() - 1.0);
  return t;
}

// Softmax over each row of `logits` in place. Returns the summed NLL of the
// targets.
double SoftmaxRowsInPlace(Tensor2& logits, std::span<const TokenId> targets) {
  const Eigen::Index cols = logits.cols();
  double total = 0.0;
  for (int i = 0; i < logits.rows(); ++i) {
    Eigen::Map<Eigen::ArrayXd> row(logits.data() + i * cols, cols);
    const double max = row.maxCoeff();
    const double target_logit = row(targets[i]);
    row = (row - max).exp();
    const double sum = row.sum();
    total += std::log(sum) + max - target_logit;
    row *= 1.0 / sum;
  }
  return total;
}

void CheckTargets(const Tensor2& logits, std::span<const TokenId> targets) {
  if (targets.size() != static_cast<std::size_t>(logits.rows())) {
    Fail(ErrorCode::kShapeMismatch,
         "logits " + logits.ShapeString() + " vs " +
             std::to_string(targets.size()) + " targets");
  }
  for (TokenId t : targets) {
    if (t < 0 || t >= logits.cols()) {
      Fail(ErrorCode::kInvalidArgument,
           "target id " + std::to_string(t) + " outside vocabulary of " +
               std::to_string(logits.cols()));
    }
  }
}

Tensor2 Sigmoid(const RowMatrix& pre) {
  Tensor2 out(static_cast<int>(pre.rows()), static_cast<int>(pre.cols()));
  View(out) = (1.0 + (-pre.array()).exp()).inverse().matrix();
  return out;
}

ParamSet BackwardFromLogitGradient(const GruLmParams& params,
                                   const ForwardCache& cache,
                                   const Tensor2& dlogits) {
  const GruLmConfig& cfg = params.config();
  const int batch = cache.batch_size;
  const int seq = cache.seq_len;
  const int h = cfg.hidden_dim;

  ParamSet grads = params.params().ZerosLike();
  const auto d_logits = View(dlogits);
  const auto top = View(cache.top_hidden);

  // Output layer.
  const RowMatrix d_out_w = d_logits.transpose() * top;
  if (cfg.tied) {
    View(grads.GetMutable(kEmbedName)) += d_out_w;
  } else {
    View(grads.GetMutable(kOutWeightName)) = d_out_w;
  }
  View(grads.GetMutable(kOutBiasName)) = d_logits.colwise().sum();
  const RowMatrix d_top = d_logits * View(params.output_weight());

  // d_layer_out[t] is batch x h: gradient w.r.t. the layer's output at t.
  std::vector<RowMatrix> d_layer_out(seq, RowMatrix(batch, h));
  for (int t = 0; t < seq; ++t) {
    for (int b = 0; b < batch; ++b) {
      d_layer_out[t].row(b) = d_top.row(static_cast<Eigen::Index>(b) * seq + t);
    }
  }

  for (int layer = cfg.num_layers - 1; layer >= 0; --layer) {
    const int in_dim = cfg.LayerInputDim(layer);
    const auto wz = View(params.update_gate(layer));
    const auto wr = View(params.reset_gate(layer));
    const auto wc = View(params.candidate_gate(layer));
    auto d_wz = View(grads.GetMutable(UpdateGateName(layer)));
    auto d_wr = View(grads.GetMutable(ResetGateName(layer)));
    auto d_wc = View(grads.GetMutable(CandidateGateName(layer)));

    std::vector<RowMatrix> d_inputs(seq);
    RowMatrix d_h_next = RowMatrix::Zero(batch, h);
    for (int t = seq - 1; t >= 0; --t) {
      const GruStep& step = cache.steps[layer][t];
      const auto gate_in = View(step.gate_input);
      const auto cand_in = View(step.candidate_input);
      const auto z = View(step.update).array();
      const auto r = View(step.reset).array();
      const auto c = View(step.candidate).array();
      const auto h_prev = gate_in.leftCols(h).array();

      const RowMatrix d_h = d_layer_out[t] + d_h_next;
      const auto dh = d_h.array();
      RowMatrix d_h_prev = (dh * (1.0 - z)).matrix();

      const RowMatrix d_cand_pre = (dh * z * (1.0 - c.square())).matrix();
      d_wc.noalias() += d_cand_pre.transpose() * cand_in;
      const RowMatrix d_cand_in = d_cand_pre * wc;
      const auto d_reset_hidden = d_cand_in.leftCols(h).array();
      d_h_prev.array() += d_reset_hidden * r;

      const RowMatrix d_update_pre =
          (dh * (c - h_prev) * z * (1.0 - z)).matrix();
      const RowMatrix d_reset_pre =
          (d_reset_hidden * h_prev * r * (1.0 - r)).matrix();
      d_wz.noalias() += d_update_pre.transpose() * gate_in;
      d_wr.noalias() += d_reset_pre.transpose() * gate_in;
      RowMatrix d_gate_in = d_update_pre * wz;
      d_gate_in.noalias() += d_reset_pre * wr;

      d_h_prev += d_gate_in.leftCols(h);
      d_inputs[t] = d_gate_in.middleCols(h, in_dim) +
                    d_cand_in.middleCols(h, in_dim);
      d_h_next = std::move(d_h_prev);
    }

    if (layer > 0) {
      d_layer_out = std::move(d_inputs);
      continue;
    }
    auto d_embed = View(grads.GetMutable(kEmbedName));
    for (int t = 0; t < seq; ++t) {
      for (int b = 0; b < batch; ++b) {
        const TokenId id = cache.inputs[static_cast<std::size_t>(b) * seq + t];
        d_embed.row(id) += d_inputs[t].row(b);
      }
    }
  }
  return grads;
}

}  // namespace

void GruLmConfig::Validate() const {
  RequireDim(vocab_size, "vocab_size");
  RequireDim(embed_dim, "embed_dim");
  RequireDim(hidden_dim, "hidden_dim");
  RequireDim(num_layers, "num_layers");
  RequireDim(bptt_len, "bptt_len");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    Fail(ErrorCode::kConfig, "init_scale must be finite and >= 0");
  }
  if (tied && embed_dim != hidden_dim) {
    Fail(ErrorCode::kConfig,
         "tied embeddings need embed_dim == hidden_dim, got " +
             std::to_string(embed_dim) + " and " + std::to_string(hidden_dim));
  }
}

std::string UpdateGateName(int layer) {
  return "gru" + std::to_string(layer) + ".wz";
}
std::string ResetGateName(int layer) {
  return "gru" + std::to_string(layer) + ".wr";
}
std::string CandidateGateName(int layer) {
  return "gru" + std::to_string(layer) + ".w";
}

std::size_t ParamCount(const GruLmConfig& config) {
  config.Validate();
  const std::size_t v = config.vocab_size;
  const std::size_t d = config.embed_dim;
  const std::size_t h = config.hidden_dim;
  std::size_t count = v * d + v;
  for (int l = 0; l < config.num_layers; ++l) {
    count += 3 * h * (h + static_cast<std::size_t>(config.LayerInputDim(l)) + 1);
  }
  if (!config.tied) count += v * h;
  return count;
}

ParamSet ZeroParamSet(const GruLmConfig& config) {
  config.Validate();
  const int h = config.hidden_dim;
  ParamSet params;
  params.Add(kEmbedName, Tensor2(config.vocab_size, config.embed_dim));
  for (int l = 0; l < config.num_layers; ++l) {
    const int cols = h + config.LayerInputDim(l) + 1;
    params.Add(UpdateGateName(l), Tensor2(h, cols));
    params.Add(ResetGateName(l), Tensor2(h, cols));
    params.Add(CandidateGateName(l), Tensor2(h, cols));
  }
  if (!config.tied) params.Add(kOutWeightName, Tensor2(config.vocab_size, h));
  params.Add(kOutBiasName, Tensor2(1, config.vocab_size));
  return params;
}

GruLmParams::GruLmParams(GruLmConfig config, ParamSet params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  RequireShapeCompatible(ZeroParamSet(config_), params_, "GRU parameters");
  embed_ = *params_.IndexOf(kEmbedName);
  out_b_ = *params_.IndexOf(kOutBiasName);
  out_w_ = config_.tied ? embed_ : *params_.IndexOf(kOutWeightName);
  for (int l = 0; l < config_.num_layers; ++l) {
    gates_.push_back(*params_.IndexOf(UpdateGateName(l)));
    gates_.push_back(*params_.IndexOf(ResetGateName(l)));
    gates_.push_back(*params_.IndexOf(CandidateGateName(l)));
  }
}

const Tensor2& GruLmParams::update_gate(int layer) const {
  return params_[gates_[3 * layer]].tensor;
}
const Tensor2& GruLmParams::reset_gate(int layer) const {
  return params_[gates_[3 * layer + 1]].tensor;
}
const Tensor2& GruLmParams::candidate_gate(int layer) const {
  return params_[gates_[3 * layer + 2]].tensor;
}
const Tensor2& GruLmParams::output_weight() const {
  return params_[out_w_].tensor;
}

GruLmParams InitParams(const GruLmConfig& config, SeededRng& rng) {
  ParamSet params = ZeroParamSet(config);
  const double scale = config.init_scale;
  const int h = config.hidden_dim;
  for (auto& entry : params) {
    if (entry.name == kOutBiasName) continue;
    Tensor2& t = entry.tensor;
    const bool is_gate = entry.name.rfind("gru", 0) == 0;
    t = UniformTensor(t.rows(), t.cols(), scale, rng);
    if (is_gate) {
      for (int i = 0; i < h; ++i) t(i, t.cols() - 1) = 0.0;
    }
  }
  return GruLmParams(config, std::move(params));
}

GruLmConfig InferConfig(const ParamSet& params, int bptt_len) {
  if (!params.Contains(kEmbedName) || !params.Contains(kOutBiasName) ||
      !params.Contains(UpdateGateName(0))) {
    Fail(ErrorCode::kData, "parameter set is not a GRU language model");
  }
  GruLmConfig config;
  const Tensor2& embed = params.Get(kEmbedName);
  config.vocab_size = embed.rows();
  config.embed_dim = embed.cols();
  config.hidden_dim = params.Get(UpdateGateName(0)).rows();
  config.num_layers = 0;
  while (params.Contains(UpdateGateName(config.num_layers))) ++config.num_layers;
  config.tied = !params.Contains(kOutWeightName);
  config.bptt_len = bptt_len;
  RequireShapeCompatible(ZeroParamSet(config), params, "checkpoint");
  return config;
}

namespace {

ForwardResult ForwardImpl(const GruLmParams& params,
                          std::span<const TokenId> inputs, int batch_size,
                          std::span<const Tensor2> initial_hidden,
                          bool with_fingerprint) {
  const GruLmConfig& cfg = params.config();
  if (batch_size <= 0 || inputs.empty() ||
      inputs.size() % static_cast<std::size_t>(batch_size) != 0) {
    Fail(ErrorCode::kShapeMismatch,
         std::to_string(inputs.size()) + " inputs do not form " +
             std::to_string(batch_size) + " equal rows");
  }
  for (TokenId id : inputs) {
    if (id < 0 || id >= cfg.vocab_size) {
      Fail(ErrorCode::kInvalidArgument,
           "token id " + std::to_string(id) + " outside vocabulary of " +
               std::to_string(cfg.vocab_size));
    }
  }
  const int seq = static_cast<int>(inputs.size() / batch_size);
  const int h = cfg.hidden_dim;
  if (!initial_hidden.empty()) {
    if (initial_hidden.size() != static_cast<std::size_t>(cfg.num_layers)) {
      Fail(ErrorCode::kShapeMismatch, "initial hidden state needs one tensor "
                                      "per layer");
    }
    for (const Tensor2& h0 : initial_hidden) {
      if (h0.rows() != batch_size || h0.cols() != h) {
        Fail(ErrorCode::kShapeMismatch,
             "initial hidden state has shape " + h0.ShapeString() +
                 ", expected (" + std::to_string(batch_size) + " x " +
                 std::to_string(h) + ")");
      }
    }
  }

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.batch_size = batch_size;
  cache.seq_len = seq;
  cache.inputs.assign(inputs.begin(), inputs.end());
  cache.steps.resize(cfg.num_layers);
  if (with_fingerprint) cache.params_fingerprint = Fingerprint(params.params());

  const auto embed = View(params.embedding());
  std::vector<RowMatrix> layer_in(seq);
  for (int t = 0; t < seq; ++t) {
    layer_in[t].resize(batch_size, cfg.embed_dim);
    for (int b = 0; b < batch_size; ++b) {
      layer_in[t].row(b) =
          embed.row(inputs[static_cast<std::size_t>(b) * seq + t]);
    }
  }

  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const int in_dim = cfg.LayerInputDim(layer);
    const int cols = h + in_dim + 1;
    const auto wz = View(params.update_gate(layer));
    const auto wr = View(params.reset_gate(layer));
    const auto wc = View(params.candidate_gate(layer));
    RowMatrix h_prev = initial_hidden.empty()
                           ? RowMatrix::Zero(batch_size, h)
                           : RowMatrix(View(initial_hidden[layer]));
    auto& steps = cache.steps[layer];
    steps.reserve(seq);
    for (int t = 0; t < seq; ++t) {
      GruStep step;
      step.gate_input = Tensor2(batch_size, cols, 1.0);
      auto gate_in = View(step.gate_input);
      gate_in.leftCols(h) = h_prev;
      gate_in.middleCols(h, in_dim) = layer_in[t];

      step.update = Sigmoid(gate_in * wz.transpose());
      step.reset = Sigmoid(gate_in * wr.transpose());
      const auto z = View(step.update).array();
      const auto r = View(step.reset).array();

      step.candidate_input = step.gate_input;
      auto cand_in = View(step.candidate_input);
      cand_in.leftCols(h) = (r * h_prev.array()).matrix();

      step.candidate = Tensor2(batch_size, h);
      View(step.candidate) = (cand_in * wc.transpose()).array().tanh().matrix();
      const auto c = View(step.candidate).array();

      step.hidden = Tensor2(batch_size, h);
      View(step.hidden) = ((1.0 - z) * h_prev.array() + z * c).matrix();
      h_prev = View(step.hidden);
      layer_in[t] = h_prev;
      steps.push_back(std::move(step));
    }
    Tensor2 final_h(batch_size, h);
    View(final_h) = h_prev;
    result.final_hidden.push_back(std::move(final_h));
  }

  cache.top_hidden = Tensor2(batch_size * seq, h);
  auto top = View(cache.top_hidden);
  for (int t = 0; t < seq; ++t) {
    for (int b = 0; b < batch_size; ++b) {
      top.row(static_cast<Eigen::Index>(b) * seq + t) = layer_in[t].row(b);
    }
  }
  cache.logits = Tensor2(batch_size * seq, cfg.vocab_size);
  auto logits = View(cache.logits);
  logits.noalias() = top * View(params.output_weight()).transpose();
  logits.rowwise() += View(params.output_bias()).row(0);
  return result;
}

}  // namespace

ForwardResult Forward(const GruLmParams& params,
                      std::span<const TokenId> inputs, int batch_size,
                      std::span<const Tensor2> initial_hidden) {
  return ForwardImpl(params, inputs, batch_size, initial_hidden, true);
}

double Loss(const Tensor2& logits, std::span<const TokenId> targets) {
  CheckTargets(logits, targets);
  const Eigen::Index cols = logits.cols();
  double total = 0.0;
  for (int i = 0; i < logits.rows(); ++i) {
    const Eigen::Map<const Eigen::ArrayXd> row(logits.data() + i * cols, cols);
    const double max = row.maxCoeff();
    total += std::log((row - max).exp().sum()) + max - row(targets[i]);
  }
  return total / static_cast<double>(logits.rows());
}

ParamSet Backward(const GruLmParams& params, const ForwardCache& cache,
                  std::span<const TokenId> targets) {
  const GruLmConfig& cfg = params.config();
  if (cache.steps.size() != static_cast<std::size_t>(cfg.num_layers) ||
      cache.logits.cols() != cfg.vocab_size ||
      cache.top_hidden.cols() != cfg.hidden_dim) {
    Fail(ErrorCode::kInvalidArgument,
         "forward cache does not match the model configuration");
  }
  if (cache.params_fingerprint != Fingerprint(params.params())) {
    Fail(ErrorCode::kInvalidArgument,
         "forward cache is stale: parameters changed since the forward pass");
  }
  CheckTargets(cache.logits, targets);
  Tensor2 d_logits = cache.logits;
  SoftmaxRowsInPlace(d_logits, targets);
  auto d = View(d_logits);
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, targets[i]) -= 1.0;
  d /= static_cast<double>(d.rows());
  return BackwardFromLogitGradient(params, cache, d_logits);
}

LossAndGradient ComputeLossAndGradient(const GruLmParams& params,
                                       const TokenBatch& batch) {
  ForwardResult fwd =
      ForwardImpl(params, batch.inputs, batch.batch_size, {}, false);
  Tensor2 d_logits = std::move(fwd.cache.logits);
  CheckTargets(d_logits, batch.targets);
  const double n = static_cast<double>(d_logits.rows());
  LossAndGradient out;
  out.loss = SoftmaxRowsInPlace(d_logits, batch.targets) / n;
  auto d = View(d_logits);
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, batch.targets[i]) -= 1.0;
  d /= n;
  out.gradient = BackwardFromLogitGradient(params, fwd.cache, d_logits);
  return out;
}

double BatchLoss(const GruLmParams& params, const TokenBatch& batch) {
  const ForwardResult fwd =
      ForwardImpl(params, batch.inputs, batch.batch_size, {}, false);
  return Loss(fwd.cache.logits, batch.targets);
}

double Perplexity(double mean_nll) { return std::exp(mean_nll); }

std::uint64_t Fingerprint(const ParamSet& params) {
  std::uint64_t h = 0x84222325CBF29CE4ULL;
  for (const auto& entry : params) {
    for (double v : entry.tensor.values()) {
      h ^= std::bit_cast<std::uint64_t>(v);
      h *= 0x100000001B3ULL;
      h ^= h >> 29;
    }
  }
  return h;
}

}  // namespace fedsim
