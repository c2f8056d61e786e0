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

#ifndef FEDSIM_MODEL_GRU_LM_H_
#define FEDSIM_MODEL_GRU_LM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedsim/corpus/corpus.h"
#include "fedsim/numeric/param_set.h"
#include "fedsim/numeric/rng.h"
#include "fedsim/numeric/tensor.h"

namespace fedsim {

struct GruLmConfig {
  int vocab_size = 0;
  int embed_dim = 64;
  int hidden_dim = 64;
  int num_layers = 1;
  // Reuse the V x d embedding as the output projection; requires d == h.
  // The output bias stays a separate V-vector.
  bool tied = false;
  int bptt_len = 20;
  double init_scale = 0.1;

  // Throws kConfig on non-positive dimensions or tied with d != h.
  void Validate() const;
  int LayerInputDim(int layer) const {
    return layer == 0 ? embed_dim : hidden_dim;
  }
};

// Stable ParamSet entry names.
inline constexpr char kEmbedName[] = "embed";
inline constexpr char kOutWeightName[] = "out.w";
inline constexpr char kOutBiasName[] = "out.b";
std::string UpdateGateName(int layer);     // "gru<l>.wz"
std::string ResetGateName(int layer);      // "gru<l>.wr"
std::string CandidateGateName(int layer);  // "gru<l>.w"

// Exact number of trainable scalars:
//   V*d + sum_l 3*h*(h + d_l + 1) + (tied ? 0 : V*h) + V.
std::size_t ParamCount(const GruLmConfig& config);

// A ParamSet checked against a GruLmConfig. Gate matrices are
// h x (h + d_in + 1) and act on the row [h_prev, x, 1]; the last column is
// the bias. When tied there is no "out.w" entry and output_weight() returns
// the embedding.
class GruLmParams {
 public:
  // Throws kShapeMismatch if `params` does not match the layout implied by
  // `config`.
  GruLmParams(GruLmConfig config, ParamSet params);

  const GruLmConfig& config() const { return config_; }
  const ParamSet& params() const { return params_; }
  ParamSet& mutable_params() { return params_; }
  ParamSet TakeParams() && { return std::move(params_); }

  const Tensor2& embedding() const { return params_[embed_].tensor; }
  Tensor2& mutable_embedding() { return params_[embed_].tensor; }
  const Tensor2& update_gate(int layer) const;
  const Tensor2& reset_gate(int layer) const;
  const Tensor2& candidate_gate(int layer) const;
  const Tensor2& output_weight() const;
  const Tensor2& output_bias() const { return params_[out_b_].tensor; }

 private:
  GruLmConfig config_;
  ParamSet params_;
  std::size_t embed_ = 0;
  std::size_t out_w_ = 0;
  std::size_t out_b_ = 0;
  std::vector<std::size_t> gates_;  // 3 per layer: z, r, candidate
};

// Builds the ParamSet layout for `config` filled with zeros.
ParamSet ZeroParamSet(const GruLmConfig& config);

// Weights uniform in [-init_scale, init_scale], biases zero.
GruLmParams InitParams(const GruLmConfig& config, SeededRng& rng);

// Recovers the model shape from a ParamSet's names and shapes.
GruLmConfig InferConfig(const ParamSet& params, int bptt_len);

// Activations of one GRU layer at one time step, batch-major.
struct GruStep {
  Tensor2 gate_input;       // [h_prev, x, 1]
  Tensor2 candidate_input;  // [r * h_prev, x, 1]
  Tensor2 update;           // z
  Tensor2 reset;            // r
  Tensor2 candidate;        // tanh(w [r * h_prev, x, 1])
  Tensor2 hidden;           // h
};

struct ForwardCache {
  int batch_size = 0;
  int seq_len = 0;
  std::vector<TokenId> inputs;
  std::vector<std::vector<GruStep>> steps;  // [layer][time]
  Tensor2 top_hidden;  // (batch * seq_len) x h, row b * seq_len + t
  Tensor2 logits;      // (batch * seq_len) x V, same row order
  std::uint64_t params_fingerprint = 0;
};

struct ForwardResult {
  ForwardCache cache;
  std::vector<Tensor2> final_hidden;  // one batch x h tensor per layer

  const Tensor2& logits() const { return cache.logits; }
};

// Runs the GRU over `inputs` (batch x seq_len, row-major). An empty
// `initial_hidden` means zeros; otherwise it holds one batch x h tensor per
// layer. Throws kInvalidArgument for token ids outside [0, V).
ForwardResult Forward(const GruLmParams& params,
                      std::span<const TokenId> inputs, int batch_size,
                      std::span<const Tensor2> initial_hidden = {});

// Mean negative log-likelihood in nats over all rows of `logits`.
double Loss(const Tensor2& logits, std::span<const TokenId> targets);

// Exact gradient of the mean NLL with respect to every parameter, truncated
// at the start of the sequence. Throws kInvalidArgument when the cache was
// produced from different parameter values or shapes.
ParamSet Backward(const GruLmParams& params, const ForwardCache& cache,
                  std::span<const TokenId> targets);

struct LossAndGradient {
  double loss = 0.0;
  ParamSet gradient;
};

// Forward, loss and backward for one batch with the hidden state starting
// at zero; shares the softmax between loss and gradient.
LossAndGradient ComputeLossAndGradient(const GruLmParams& params,
                                       const TokenBatch& batch);

// Mean NLL of one batch with the hidden state starting at zero.
double BatchLoss(const GruLmParams& params, const TokenBatch& batch);

// exp(mean_nll); equals 2^H when H is measured in bits.
double Perplexity(double mean_nll);

// Content hash of every parameter value; used to detect stale caches.
std::uint64_t Fingerprint(const ParamSet& params);

}  // namespace fedsim

#endif  // FEDSIM_MODEL_GRU_LM_H_
