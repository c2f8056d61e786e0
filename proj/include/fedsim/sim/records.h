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

#ifndef FEDSIM_SIM_RECORDS_H_
#define FEDSIM_SIM_RECORDS_H_

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fedsim/aggregation/aggregation.h"
#include "fedsim/sim/simulator.h"

namespace fedsim {

// One JSON object per line:
//   {"round":1,"selected":[...],"val_ppl":x|null,"test_ppl":x|null,
//    "mean_train_loss":x|null,"attention":[{"layer":...,"min_score":...,
//    "max_score":...,"max_weight":...}],"wall_seconds":x}
// "wall_seconds" is written only when include_timing is set.
std::string FormatRecordLine(const RoundRecord& record, bool include_timing);
RoundRecord ParseRecordLine(std::string_view line);

// {"round":t,"alpha":{layer:[...]},"scores":{layer:[...]}}
std::string FormatAttentionLine(int round, const AttentionWeights& weights);

// "round,val_ppl,test_ppl" header plus one row per evaluated round.
std::string FormatSummaryCsv(std::span<const RoundRecord> records);

// Output files of one run under `dir`:
//   records.jsonl    appended and flushed after every round
//   attention.jsonl  when attention export is on and the strategy is fedatt
//   summary.csv      written by Finish()
//   checkpoint.bin   final ParamSet, written by Finish()
//   config.txt       the effective configuration
class RunWriter {
 public:
  RunWriter(const std::filesystem::path& dir, const SimConfig& config);

  void Append(const RoundRecord& record,
              const std::optional<AttentionWeights>& attention);
  void Finish(const SimulationResult& result);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool include_timing_;
  bool export_attention_;
  std::ofstream records_;
  std::ofstream attention_;
};

}  // namespace fedsim

#endif  // FEDSIM_SIM_RECORDS_H_
