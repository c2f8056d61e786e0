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

#ifndef FEDSIM_CLIENT_CLIENT_TRAINER_H_
#define FEDSIM_CLIENT_CLIENT_TRAINER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedsim/corpus/vocabulary.h"
#include "fedsim/model/gru_lm.h"
#include "fedsim/numeric/param_set.h"
#include "fedsim/numeric/rng.h"

namespace fedsim {

struct ClientConfig {
  int batch_size = 20;
  int local_epochs = 5;
  double learning_rate = 0.5;
  double momentum = 0.9;
  // Global-norm gradient clip applied before the momentum update; <= 0
  // disables clipping.
  double clip_norm = 5.0;

  void Validate() const;
};

// Gaussian randomization of uploaded parameters. `beta` is the magnitude
// coefficient on N(0, sigma^2) noise; it is unrelated to the momentum term.
struct DpConfig {
  bool enabled = false;
  double beta = 0.0;
  double sigma = 1.0;

  void Validate() const;
  bool active() const { return enabled && beta * sigma != 0.0; }
};

struct ClientUpdate {
  int client_id = 0;
  ParamSet params;
  // Token count of the client's shard; the FedAvg weight.
  std::size_t num_samples = 0;
  // Mean minibatch loss of each local epoch, in nats per token.
  std::vector<double> epoch_losses;

  // Loss of the final epoch, or NaN when no training happened.
  double final_loss() const;
};

// Local training: starting from a copy of `server_params`, E epochs of
// momentum SGD over Batchify(shard, B, bptt_len) in order. The velocity
// starts at zero on every call. Throws kData if the shard is too short for a
// single batch and kNumerical (naming the client, epoch and batch) on a
// non-finite loss.
ClientUpdate RunClientUpdate(int client_id, const ParamSet& server_params,
                             const GruLmConfig& model,
                             std::span<const TokenId> shard,
                             const ClientConfig& config);

// Returns params - beta * N(0, sigma^2), drawn entry by entry in ParamSet
// order. The uploaded difference (server - client) therefore carries
// +beta * noise. Identity when the mechanism is inactive.
ParamSet AddDpNoise(const ParamSet& params, const ParamSet& server_params,
                    const DpConfig& dp, SeededRng& rng);

}  // namespace fedsim

#endif  // FEDSIM_CLIENT_CLIENT_TRAINER_H_
