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

#include "fedsim/client/client_trainer.h"

#include <cmath>
#include <limits>
#include <string>

#include "fedsim/common/error.h"

namespace fedsim {

void ClientConfig::Validate() const {
  if (batch_size < 1) Fail(ErrorCode::kConfig, "batch_size must be >= 1");
  if (local_epochs < 0) Fail(ErrorCode::kConfig, "local_epochs must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorCode::kConfig, "learning_rate must be > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    Fail(ErrorCode::kConfig, "momentum must be in [0, 1)");
  }
  if (!std::isfinite(clip_norm)) Fail(ErrorCode::kConfig, "clip_norm must be finite");
}

void DpConfig::Validate() const {
  if (!enabled) return;
  if (!(beta >= 0.0 && beta <= 1.0)) {
    Fail(ErrorCode::kConfig, "dp beta must be in [0, 1]");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    Fail(ErrorCode::kConfig, "dp sigma must be finite and >= 0");
  }
}

double ClientUpdate::final_loss() const {
  return epoch_losses.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : epoch_losses.back();
}

ClientUpdate RunClientUpdate(int client_id, const ParamSet& server_params,
                             const GruLmConfig& model,
                             std::span<const TokenId> shard,
                             const ClientConfig& config) {
  config.Validate();
  GruLmParams params(model, server_params);
  const std::vector<TokenBatch> batches =
      Batchify(shard, config.batch_size, model.bptt_len);

  ParamSet velocity = server_params.ZerosLike();
  ClientUpdate update;
  update.client_id = client_id;
  update.num_samples = shard.size();
  for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      LossAndGradient step = ComputeLossAndGradient(params, batches[b]);
      if (!std::isfinite(step.loss)) {
        Fail(ErrorCode::kNumerical,
             "client " + std::to_string(client_id) + ": non-finite loss at "
             "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b));
      }
      epoch_loss += step.loss;
      if (config.clip_norm > 0.0) {
        const double norm = GlobalNorm(step.gradient);
        if (norm > config.clip_norm) Scale(step.gradient, config.clip_norm / norm);
      }
      Scale(velocity, config.momentum);
      AddScaled(velocity, step.gradient, 1.0);
      AddScaled(params.mutable_params(), velocity, -config.learning_rate);
    }
    update.epoch_losses.push_back(epoch_loss /
                                  static_cast<double>(batches.size()));
  }
  update.params = std::move(params).TakeParams();
  return update;
}

ParamSet AddDpNoise(const ParamSet& params, const ParamSet& server_params,
                    const DpConfig& dp, SeededRng& rng) {
  RequireShapeCompatible(params, server_params, "AddDpNoise");
  dp.Validate();
  ParamSet noisy = params;
  if (!dp.active()) return noisy;
  const double scale = dp.beta * dp.sigma;
  for (auto& entry : noisy) {
    for (double& v : entry.tensor.values()) v -= scale * rng.NextGaussian();
  }
  return noisy;
}

}  // namespace fedsim
