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

#ifndef FEDSIM_SIM_SIM_CONFIG_H_
#define FEDSIM_SIM_SIM_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/aggregation/aggregation.h"
#include "fedsim/client/client_trainer.h"
#include "fedsim/corpus/corpus.h"
#include "fedsim/model/gru_lm.h"

namespace fedsim {

struct SimConfig {
  int k_clients = 100;
  double fraction = 0.1;
  int rounds = 50;
  AggregatorConfig aggregator;
  ClientConfig client;
  DpConfig dp;
  // vocab_size is filled in from the corpus vocabulary.
  GruLmConfig model;
  std::size_t max_vocab = 10000;
  int block_len = 64;

  std::filesystem::path train_path;
  std::filesystem::path valid_path;
  std::filesystem::path test_path;
  std::filesystem::path output_dir = "fedsim_out";

  std::uint64_t master_seed = 1;
  std::optional<double> ppl_threshold;
  Split threshold_split = Split::kValid;
  int eval_every = 1;
  int eval_batch_size = 20;
  // Worker threads for client updates; 0 picks the hardware concurrency.
  int threads = 1;
  bool export_attention = false;
  // Wall-clock times vary between runs, so they are left out of the records
  // file unless asked for.
  bool record_timing = false;

  // m = max(floor(C * K), 1).
  int ClientsPerRound() const;
  void Validate() const;
};

// fedsgd runs as fedavg with C = 1 and E = 1; other strategies pass through.
SimConfig EffectiveConfig(SimConfig config);

// Flat "key = value" text, one pair per line; '#' starts a comment. Every
// key has a default and unknown keys are kConfig errors. Relative corpus and
// output paths are resolved against `base_dir`.
SimConfig ParseSimConfig(std::string_view text,
                         const std::filesystem::path& base_dir = {});
SimConfig LoadSimConfig(const std::filesystem::path& path);

// Sets one field from its textual form, e.g. ("fraction", "0.5").
void ApplyConfigValue(SimConfig& config, std::string_view key,
                      std::string_view value);

// Every recognised key, in canonical order.
const std::vector<std::string>& ConfigKeys();

// Renders a config in the same format ParseSimConfig accepts.
std::string FormatSimConfig(const SimConfig& config);

}  // namespace fedsim

#endif  // FEDSIM_SIM_SIM_CONFIG_H_
