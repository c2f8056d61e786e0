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

#ifndef FEDSIM_SIM_SIMULATOR_H_
#define FEDSIM_SIM_SIMULATOR_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedsim/aggregation/aggregation.h"
#include "fedsim/client/client_trainer.h"
#include "fedsim/corpus/corpus.h"
#include "fedsim/model/gru_lm.h"
#include "fedsim/numeric/rng.h"
#include "fedsim/sim/sim_config.h"

namespace fedsim {

struct LayerAttentionSummary {
  std::string layer;
  double min_score = 0.0;
  double max_score = 0.0;
  double max_weight = 0.0;
};

struct RoundRecord {
  int round = 0;  // 1-based
  std::vector<int> selected;
  std::optional<double> val_ppl;
  std::optional<double> test_ppl;
  // Mean over participating clients of their final-epoch loss; NaN when no
  // local training happened.
  double mean_train_loss = 0.0;
  double wall_seconds = 0.0;
  std::vector<LayerAttentionSummary> attention;  // fedatt only
};

// m = max(floor(C * K), 1) distinct ids drawn uniformly without replacement,
// returned in ascending order. Depends only on (master seed, round).
std::vector<int> SelectClients(int k_total, double fraction, int round,
                               const SeededRng& master);

// Per-run RNG streams, all derived from the master seed.
SeededRng InitStream(const SeededRng& master);
SeededRng PartitionStream(const SeededRng& master);
SeededRng ClientStream(const SeededRng& master, int round, int client_id);

// exp of the mean NLL over every token of Batchify(stream, eval_batch_size,
// model.bptt_len), with the hidden state reset for each batch. Throws kData
// when the stream is shorter than one batch.
double Evaluate(const ParamSet& params, const TokenStream& stream,
                const GruLmConfig& model, int eval_batch_size = 20);

// Everything a round needs besides the server state. Holds references; the
// corpus and partition must outlive it.
struct SimContext {
  const SimConfig& config;  // already passed through EffectiveConfig
  const Corpus& corpus;
  const Partition& partition;
  GruLmConfig model;
  SeededRng master;
};

struct RoundResult {
  ParamSet params;
  RoundRecord record;
  std::optional<AttentionWeights> attention;
  // Uploaded client parameters in client-id order (after noise), kept only
  // when requested.
  std::vector<ClientUpdate> client_updates;
};

// One communication round: select clients, train them (concurrently when
// config.threads != 1), randomize uploads if DP is on, aggregate, and
// evaluate when the round is due. Errors are rethrown annotated with the
// round index, keeping their category.
RoundResult RunRound(int round, const ParamSet& state, const SimContext& ctx,
                     bool keep_client_updates = false);

struct SimulationResult {
  std::vector<RoundRecord> records;
  ParamSet final_params;
  GruLmConfig model;
  // Evaluated round with the lowest validation perplexity, and its test
  // perplexity.
  std::optional<int> best_round;
  std::optional<double> best_test_ppl;
  bool stopped_early = false;
};

// Observer called after each round (e.g. to append to a records file).
using RoundCallback =
    std::function<void(const RoundRecord&, const std::optional<AttentionWeights>&)>;

// Runs up to config.rounds rounds, stopping after the first evaluated round
// whose perplexity on config.threshold_split is below config.ppl_threshold.
SimulationResult RunSimulation(const SimConfig& config, const Corpus& corpus,
                               const RoundCallback& on_round = {});

// Same, loading the corpus from the configured paths first.
SimulationResult RunSimulation(const SimConfig& config,
                               const RoundCallback& on_round = {});

// 1-based position of the first record whose perplexity on `split` (valid or
// test) is below `threshold`; nullopt when never reached. Records without an
// evaluation are skipped but still counted in the position.
std::optional<int> RoundsToThreshold(std::span<const RoundRecord> records,
                                     double threshold,
                                     Split split = Split::kValid);

}  // namespace fedsim

#endif  // FEDSIM_SIM_SIMULATOR_H_
