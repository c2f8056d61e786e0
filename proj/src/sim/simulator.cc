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

#include "fedsim/sim/simulator.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

int WorkerCount(int requested, int jobs) {
  int n = requested;
  if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::clamp(n, 1, std::max(jobs, 1));
}

// Runs fn(i) for i in [0, n) on `workers` threads. The first exception by
// index is rethrown after every job has finished.
template <typename Fn>
void ParallelFor(int n, int workers, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<LayerAttentionSummary> Summarize(const AttentionWeights& weights) {
  std::vector<LayerAttentionSummary> out;
  out.reserve(weights.layers.size());
  for (const auto& layer : weights.layers) {
    const auto [min_s, max_s] =
        std::minmax_element(layer.scores.begin(), layer.scores.end());
    out.push_back({layer.name, *min_s, *max_s,
                   *std::max_element(layer.weights.begin(), layer.weights.end())});
  }
  return out;
}

}  // namespace

std::vector<int> SelectClients(int k_total, double fraction, int round,
                               const SeededRng& master) {
  SimConfig shape;
  shape.k_clients = k_total;
  shape.fraction = fraction;
  if (k_total < 1 || !(fraction > 0.0 && fraction <= 1.0)) {
    Fail(ErrorCode::kConfig, "client selection needs K >= 1 and C in (0, 1]");
  }
  const int m = shape.ClientsPerRound();
  SeededRng rng = master.Derive("select").Derive(static_cast<std::uint64_t>(round));
  std::vector<int> ids(k_total);
  std::iota(ids.begin(), ids.end(), 0);
  // Partial Fisher-Yates: the first m slots become the sample.
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.UniformInt(k_total - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

SeededRng InitStream(const SeededRng& master) { return master.Derive("init"); }

SeededRng PartitionStream(const SeededRng& master) {
  return master.Derive("partition");
}

SeededRng ClientStream(const SeededRng& master, int round, int client_id) {
  return master.Derive("client")
      .Derive(static_cast<std::uint64_t>(round))
      .Derive(static_cast<std::uint64_t>(client_id));
}

double Evaluate(const ParamSet& params, const TokenStream& stream,
                const GruLmConfig& model, int eval_batch_size) {
  const GruLmParams gru(model, params);
  const std::vector<TokenBatch> batches =
      Batchify(stream.ids, eval_batch_size, model.bptt_len);
  double total = 0.0;
  std::size_t tokens = 0;
  for (const TokenBatch& batch : batches) {
    total += BatchLoss(gru, batch) * static_cast<double>(batch.num_tokens());
    tokens += batch.num_tokens();
  }
  return Perplexity(total / static_cast<double>(tokens));
}

RoundResult RunRound(int round, const ParamSet& state, const SimContext& ctx,
                     bool keep_client_updates) {
  const SimConfig& cfg = ctx.config;
  const auto start = std::chrono::steady_clock::now();
  try {
    RoundResult result;
    result.record.round = round;
    result.record.selected =
        SelectClients(cfg.k_clients, cfg.fraction, round, ctx.master);
    const auto& selected = result.record.selected;
    for (int id : selected) {
      if (static_cast<std::size_t>(id) >= ctx.partition.num_shards()) {
        Fail(ErrorCode::kConfig, "client " + std::to_string(id) +
                                     " has no shard in the partition");
      }
    }

    std::vector<ClientUpdate> updates(selected.size());
    ParallelFor(static_cast<int>(selected.size()),
                WorkerCount(cfg.threads, static_cast<int>(selected.size())),
                [&](int i) {
                  const int id = selected[i];
                  ClientUpdate update =
                      RunClientUpdate(id, state, ctx.model,
                                      ctx.partition.shards[id], cfg.client);
                  if (cfg.dp.active()) {
                    SeededRng rng = ClientStream(ctx.master, round, id);
                    update.params = AddDpNoise(update.params, state, cfg.dp, rng);
                  }
                  updates[i] = std::move(update);
                });

    double loss_sum = 0.0;
    for (const auto& u : updates) loss_sum += u.final_loss();
    result.record.mean_train_loss = loss_sum / static_cast<double>(updates.size());
    if (keep_client_updates) result.client_updates = updates;

    AggregationResult agg = Aggregate(cfg.aggregator, state, std::move(updates));
    if (!AllFinite(agg.params)) {
      Fail(ErrorCode::kNumerical, "aggregated parameters are not finite");
    }
    result.params = std::move(agg.params);
    if (agg.attention) {
      result.record.attention = Summarize(*agg.attention);
      result.attention = std::move(agg.attention);
    }

    if (round % cfg.eval_every == 0 || round == cfg.rounds) {
      result.record.val_ppl = Evaluate(result.params, ctx.corpus.valid,
                                       ctx.model, cfg.eval_batch_size);
      result.record.test_ppl = Evaluate(result.params, ctx.corpus.test,
                                        ctx.model, cfg.eval_batch_size);
      if (!std::isfinite(*result.record.val_ppl) ||
          !std::isfinite(*result.record.test_ppl)) {
        Fail(ErrorCode::kNumerical, "perplexity is not finite");
      }
    }
    result.record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
  } catch (const Error& e) {
    throw Error(e.code(), "round " + std::to_string(round) + ": " + e.what());
  }
}

SimulationResult RunSimulation(const SimConfig& raw_config, const Corpus& corpus,
                               const RoundCallback& on_round) {
  const SimConfig config = EffectiveConfig(raw_config);
  config.Validate();

  SimulationResult out;
  out.model = config.model;
  out.model.vocab_size = static_cast<int>(corpus.vocab.size());
  out.model.Validate();

  const SeededRng master(config.master_seed);
  SeededRng partition_rng = PartitionStream(master);
  const Partition partition =
      PartitionIid(corpus.train, config.k_clients, config.block_len, partition_rng);
  // Reject shards that cannot hold a training batch before round 1.
  const std::size_t min_shard =
      static_cast<std::size_t>(config.client.batch_size) *
      (config.model.bptt_len + 1);
  for (std::size_t k = 0; k < partition.num_shards(); ++k) {
    if (partition.shards[k].size() < min_shard) {
      Fail(ErrorCode::kData,
           "shard " + std::to_string(k) + " has " +
               std::to_string(partition.shards[k].size()) +
               " tokens; one training batch needs " + std::to_string(min_shard));
    }
  }
  const std::size_t min_eval =
      static_cast<std::size_t>(config.eval_batch_size) * (config.model.bptt_len + 1);
  if (corpus.valid.ids.size() < min_eval || corpus.test.ids.size() < min_eval) {
    Fail(ErrorCode::kData, "validation and test streams need at least " +
                               std::to_string(min_eval) + " tokens");
  }

  SeededRng init_rng = InitStream(master);
  ParamSet state = InitParams(out.model, init_rng).params();
  const SimContext ctx{config, corpus, partition, out.model, master};

  double best_val = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= config.rounds; ++t) {
    RoundResult round = RunRound(t, state, ctx);
    state = std::move(round.params);
    if (round.record.val_ppl && *round.record.val_ppl < best_val) {
      best_val = *round.record.val_ppl;
      out.best_round = t;
      out.best_test_ppl = round.record.test_ppl;
    }
    if (on_round) on_round(round.record, round.attention);
    out.records.push_back(std::move(round.record));

    const RoundRecord& rec = out.records.back();
    const auto& watched =
        config.threshold_split == Split::kTest ? rec.test_ppl : rec.val_ppl;
    if (config.ppl_threshold && watched && *watched < *config.ppl_threshold) {
      out.stopped_early = t < config.rounds;
      break;
    }
  }
  out.final_params = std::move(state);
  return out;
}

SimulationResult RunSimulation(const SimConfig& config,
                               const RoundCallback& on_round) {
  config.Validate();
  const Corpus corpus = LoadCorpus(config.train_path, config.valid_path,
                                   config.test_path, config.max_vocab);
  return RunSimulation(config, corpus, on_round);
}

std::optional<int> RoundsToThreshold(std::span<const RoundRecord> records,
                                     double threshold, Split split) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& ppl =
        split == Split::kTest ? records[i].test_ppl : records[i].val_ppl;
    if (ppl && *ppl < threshold) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

}  // namespace fedsim
