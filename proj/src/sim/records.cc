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

#include "fedsim/sim/records.h"

#include <cmath>
#include <sstream>

#include "fedsim/common/error.h"
#include "fedsim/model/param_io.h"
#include "json.hpp"

namespace fedsim {
namespace {

using nlohmann::json;

json OptionalNumber(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

std::optional<double> ReadOptional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string FormatNumber(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string FormatRecordLine(const RoundRecord& record, bool include_timing) {
  json j;
  j["round"] = record.round;
  j["selected"] = record.selected;
  j["val_ppl"] = OptionalNumber(record.val_ppl);
  j["test_ppl"] = OptionalNumber(record.test_ppl);
  j["mean_train_loss"] = OptionalNumber(record.mean_train_loss);
  json attention = json::array();
  for (const auto& a : record.attention) {
    attention.push_back({{"layer", a.layer},
                         {"min_score", a.min_score},
                         {"max_score", a.max_score},
                         {"max_weight", a.max_weight}});
  }
  j["attention"] = std::move(attention);
  if (include_timing) j["wall_seconds"] = record.wall_seconds;
  return j.dump();
}

RoundRecord ParseRecordLine(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
    RoundRecord record;
    record.round = j.at("round").get<int>();
    record.selected = j.at("selected").get<std::vector<int>>();
    record.val_ppl = ReadOptional(j, "val_ppl");
    record.test_ppl = ReadOptional(j, "test_ppl");
    record.mean_train_loss =
        ReadOptional(j, "mean_train_loss").value_or(std::nan(""));
    for (const auto& a : j.value("attention", json::array())) {
      record.attention.push_back({a.at("layer").get<std::string>(),
                                  a.at("min_score").get<double>(),
                                  a.at("max_score").get<double>(),
                                  a.at("max_weight").get<double>()});
    }
    record.wall_seconds = j.value("wall_seconds", 0.0);
    return record;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kData, std::string("malformed record line: ") + e.what());
  }
}

std::string FormatAttentionLine(int round, const AttentionWeights& weights) {
  json alpha = json::object();
  json scores = json::object();
  for (const auto& layer : weights.layers) {
    alpha[layer.name] = layer.weights;
    scores[layer.name] = layer.scores;
  }
  // nlohmann::json objects sort keys; that order is stable across runs.
  return json{{"round", round}, {"alpha", alpha}, {"scores", scores}}.dump();
}

std::string FormatSummaryCsv(std::span<const RoundRecord> records) {
  std::string out = "round,val_ppl,test_ppl\n";
  for (const auto& r : records) {
    if (!r.val_ppl && !r.test_ppl) continue;
    out += std::to_string(r.round) + "," +
           (r.val_ppl ? FormatNumber(*r.val_ppl) : "") + "," +
           (r.test_ppl ? FormatNumber(*r.test_ppl) : "") + "\n";
  }
  return out;
}

RunWriter::RunWriter(const std::filesystem::path& dir, const SimConfig& config)
    : dir_(dir),
      include_timing_(config.record_timing),
      export_attention_(config.export_attention &&
                        config.aggregator.strategy == Strategy::kFedAtt) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    Fail(ErrorCode::kData, "cannot create output directory '" + dir_.string() +
                               "': " + ec.message());
  }
  records_.open(dir_ / "records.jsonl", std::ios::binary | std::ios::trunc);
  if (!records_) {
    Fail(ErrorCode::kData, "cannot write '" + (dir_ / "records.jsonl").string() + "'");
  }
  if (export_attention_) {
    attention_.open(dir_ / "attention.jsonl", std::ios::binary | std::ios::trunc);
  }
  std::ofstream cfg(dir_ / "config.txt", std::ios::binary | std::ios::trunc);
  cfg << FormatSimConfig(config);
}

void RunWriter::Append(const RoundRecord& record,
                       const std::optional<AttentionWeights>& attention) {
  records_ << FormatRecordLine(record, include_timing_) << '\n';
  records_.flush();
  if (export_attention_ && attention) {
    attention_ << FormatAttentionLine(record.round, *attention) << '\n';
    attention_.flush();
  }
  if (!records_) Fail(ErrorCode::kData, "failed writing round records");
}

void RunWriter::Finish(const SimulationResult& result) {
  std::ofstream csv(dir_ / "summary.csv", std::ios::binary | std::ios::trunc);
  csv << FormatSummaryCsv(result.records);
  if (!csv) Fail(ErrorCode::kData, "failed writing summary.csv");
  WriteParamSetFile(result.final_params, dir_ / "checkpoint.bin");
}

}  // namespace fedsim
