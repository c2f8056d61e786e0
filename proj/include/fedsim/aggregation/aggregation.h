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

#ifndef FEDSIM_AGGREGATION_AGGREGATION_H_
#define FEDSIM_AGGREGATION_AGGREGATION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/client/client_trainer.h"
#include "fedsim/numeric/kernels.h"
#include "fedsim/numeric/param_set.h"

namespace fedsim {

enum class Strategy { kFedSgd, kFedAvg, kFedAtt };

std::string_view StrategyName(Strategy strategy);
// "fedsgd" / "fedavg" / "fedatt"; anything else is a kConfig error.
Strategy ParseStrategy(std::string_view text);

struct AggregatorConfig {
  Strategy strategy = Strategy::kFedAtt;
  // Server step size for the attentive update.
  double epsilon = 1.0;
  NormOrder norm_order = NormOrder::kL2;

  void Validate() const;
};

// Attention of one named tensor ("layer") over the participating clients.
struct LayerAttention {
  std::string name;
  std::vector<double> scores;   // s_k = ||server - client_k||_p
  std::vector<double> weights;  // alpha_k = softmax(s)_k
};

struct AttentionWeights {
  std::vector<LayerAttention> layers;  // in server ParamSet order

  std::size_t num_clients() const {
    return layers.empty() ? 0 : layers.front().weights.size();
  }
  // Throws kInvalidArgument for unknown names.
  const LayerAttention& layer(std::string_view name) const;
};

// Per named tensor l: s^l_k = ||server[l] - clients[k][l]||_p and
// alpha^l = softmax(s^l). Larger distance means larger weight.
AttentionWeights AttentionScores(const ParamSet& server,
                                 std::span<const ParamSet> clients,
                                 NormOrder p);

// Per layer: server - epsilon * sum_k alpha_k * (server - client_k). Client
// sums use compensated summation in list order.
ParamSet FedAttUpdate(const ParamSet& server, std::span<const ParamSet> clients,
                      const AttentionWeights& weights, double epsilon);

// Sample-weighted mean of the client parameters; the server values only
// supply the expected shapes.
ParamSet FedAvgUpdate(const ParamSet& server,
                      std::span<const ClientUpdate> updates);

// FedSGD is FedAvg with full participation and one local epoch.
struct FedSgdSettings {
  double fraction = 1.0;
  int local_epochs = 1;
  Strategy aggregator = Strategy::kFedAvg;
};
FedSgdSettings FedSgdRoundConfig();

struct AggregationResult {
  ParamSet params;
  std::optional<AttentionWeights> attention;  // set for fedatt only
};

// Sorts the updates by client id and dispatches to the configured strategy,
// so the result does not depend on arrival order.
AggregationResult Aggregate(const AggregatorConfig& config,
                            const ParamSet& server,
                            std::vector<ClientUpdate> updates);

}  // namespace fedsim

#endif  // FEDSIM_AGGREGATION_AGGREGATION_H_
