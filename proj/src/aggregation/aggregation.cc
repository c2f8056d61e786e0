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

#include "fedsim/aggregation/aggregation.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void RequireClients(const ParamSet& server, std::span<const ParamSet> clients,
                    std::string_view context) {
  if (clients.empty()) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(context) + ": no client parameters");
  }
  for (std::size_t k = 0; k < clients.size(); ++k) {
    RequireShapeCompatible(server, clients[k],
                           std::string(context) + " (client position " +
                               std::to_string(k) + ")");
  }
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kFedSgd:
      return "fedsgd";
    case Strategy::kFedAvg:
      return "fedavg";
    case Strategy::kFedAtt:
      return "fedatt";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view text) {
  if (text == "fedsgd") return Strategy::kFedSgd;
  if (text == "fedavg") return Strategy::kFedAvg;
  if (text == "fedatt") return Strategy::kFedAtt;
  Fail(ErrorCode::kConfig, "unknown aggregation strategy '" +
                               std::string(text) +
                               "' (expected fedsgd, fedavg or fedatt)");
}

void AggregatorConfig::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Fail(ErrorCode::kConfig, "epsilon must be > 0");
  }
}

const LayerAttention& AttentionWeights::layer(std::string_view name) const {
  for (const auto& l : layers) {
    if (l.name == name) return l;
  }
  Fail(ErrorCode::kInvalidArgument,
       "no attention for layer '" + std::string(name) + "'");
}

AttentionWeights AttentionScores(const ParamSet& server,
                                 std::span<const ParamSet> clients,
                                 NormOrder p) {
  RequireClients(server, clients, "AttentionScores");
  AttentionWeights out;
  out.layers.reserve(server.size());
  for (std::size_t l = 0; l < server.size(); ++l) {
    LayerAttention layer;
    layer.name = server[l].name;
    layer.scores.reserve(clients.size());
    for (const ParamSet& client : clients) {
      layer.scores.push_back(
          PNormDiff(server[l].tensor, client[l].tensor, p));
    }
    layer.weights = Softmax(layer.scores);
    out.layers.push_back(std::move(layer));
  }
  return out;
}

ParamSet FedAttUpdate(const ParamSet& server, std::span<const ParamSet> clients,
                      const AttentionWeights& weights, double epsilon) {
  RequireClients(server, clients, "FedAttUpdate");
  if (weights.layers.size() != server.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "FedAttUpdate: attention covers " +
             std::to_string(weights.layers.size()) + " layers, server has " +
             std::to_string(server.size()));
  }
  ParamSet next = server;
  for (std::size_t l = 0; l < server.size(); ++l) {
    const LayerAttention& att = weights.layers[l];
    if (att.name != server[l].name) {
      Fail(ErrorCode::kInvalidArgument, "FedAttUpdate: attention layer '" +
                                            att.name + "' does not match '" +
                                            server[l].name + "'");
    }
    if (att.weights.size() != clients.size()) {
      Fail(ErrorCode::kInvalidArgument,
           "FedAttUpdate: layer '" + att.name + "' has " +
               std::to_string(att.weights.size()) + " attention weights for " +
               std::to_string(clients.size()) + " clients");
    }
    const auto theta = server[l].tensor.values();
    auto out = next[l].tensor.values();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      CompensatedSum step;
      for (std::size_t k = 0; k < clients.size(); ++k) {
        step.Add(att.weights[k] * (theta[j] - clients[k][l].tensor.values()[j]));
      }
      out[j] = theta[j] - epsilon * step.value();
    }
  }
  return next;
}

ParamSet FedAvgUpdate(const ParamSet& server,
                      std::span<const ClientUpdate> updates) {
  if (updates.empty()) {
    Fail(ErrorCode::kInvalidArgument, "FedAvgUpdate: no client updates");
  }
  double total = 0.0;
  for (const auto& u : updates) {
    RequireShapeCompatible(server, u.params,
                           "FedAvgUpdate (client " +
                               std::to_string(u.client_id) + ")");
    total += static_cast<double>(u.num_samples);
  }
  if (total == 0.0) {
    Fail(ErrorCode::kInvalidArgument,
         "FedAvgUpdate: every client reports zero samples");
  }
  std::vector<double> weight;
  weight.reserve(updates.size());
  for (const auto& u : updates) {
    weight.push_back(static_cast<double>(u.num_samples) / total);
  }
  ParamSet next = server;
  for (std::size_t l = 0; l < server.size(); ++l) {
    auto out = next[l].tensor.values();
    for (std::size_t j = 0; j < out.size(); ++j) {
      CompensatedSum sum;
      for (std::size_t k = 0; k < updates.size(); ++k) {
        sum.Add(weight[k] * updates[k].params[l].tensor.values()[j]);
      }
      out[j] = sum.value();
    }
  }
  return next;
}

FedSgdSettings FedSgdRoundConfig() { return FedSgdSettings{}; }

AggregationResult Aggregate(const AggregatorConfig& config,
                            const ParamSet& server,
                            std::vector<ClientUpdate> updates) {
  config.Validate();
  std::sort(updates.begin(), updates.end(),
            [](const ClientUpdate& a, const ClientUpdate& b) {
              return a.client_id < b.client_id;
            });
  AggregationResult result;
  if (config.strategy != Strategy::kFedAtt) {
    result.params = FedAvgUpdate(server, updates);
    return result;
  }
  std::vector<ParamSet> clients;
  clients.reserve(updates.size());
  for (auto& u : updates) clients.push_back(std::move(u.params));
  AttentionWeights weights = AttentionScores(server, clients, config.norm_order);
  result.params = FedAttUpdate(server, clients, weights, config.epsilon);
  result.attention = std::move(weights);
  return result;
}

}  // namespace fedsim
