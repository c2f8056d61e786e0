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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fedsim/common/error.h"
#include "fedsim/corpus/corpus.h"
#include "fedsim/model/param_io.h"
#include "fedsim/sim/records.h"
#include "gtest/gtest.h"

namespace fedsim {
namespace {

RoundRecord Sample() {
  RoundRecord r;
  r.round = 4;
  r.selected = {1, 5, 7};
  r.val_ppl = 101.25;
  r.test_ppl = 99.5;
  r.mean_train_loss = 4.75;
  r.wall_seconds = 1.5;
  r.attention = {{"embed", 0.5, 2.0, 0.75}};
  return r;
}

TEST(RecordLineTest, KnownLine) {
  EXPECT_EQ(FormatRecordLine(Sample(), false),
            "{\"attention\":[{\"layer\":\"embed\",\"max_score\":2.0,"
            "\"max_weight\":0.75,\"min_score\":0.5}],\"mean_train_loss\":4.75,"
            "\"round\":4,\"selected\":[1,5,7],\"test_ppl\":99.5,"
            "\"val_ppl\":101.25}");
  EXPECT_NE(FormatRecordLine(Sample(), true).find("\"wall_seconds\":1.5"),
            std::string::npos);
}

TEST(RecordLineTest, MissingValuesAreNull) {
  RoundRecord r;
  r.round = 1;
  r.mean_train_loss = std::nan("");
  const std::string line = FormatRecordLine(r, false);
  EXPECT_NE(line.find("\"val_ppl\":null"), std::string::npos);
  EXPECT_NE(line.find("\"mean_train_loss\":null"), std::string::npos);
  const RoundRecord back = ParseRecordLine(line);
  EXPECT_FALSE(back.val_ppl.has_value());
  EXPECT_TRUE(std::isnan(back.mean_train_loss));
}

TEST(RecordLineTest, RoundTrip) {
  RoundRecord r = Sample();
  r.val_ppl = 1.0 / 3.0;
  const RoundRecord back = ParseRecordLine(FormatRecordLine(r, true));
  EXPECT_EQ(back.round, r.round);
  EXPECT_EQ(back.selected, r.selected);
  EXPECT_EQ(back.val_ppl, r.val_ppl);
  EXPECT_EQ(back.test_ppl, r.test_ppl);
  EXPECT_EQ(back.wall_seconds, r.wall_seconds);
  ASSERT_EQ(back.attention.size(), 1u);
  EXPECT_EQ(back.attention[0].max_weight, 0.75);
  try {
    ParseRecordLine("{\"round\":");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(AttentionLineTest, Layout) {
  AttentionWeights w;
  w.layers.push_back({"out.b", {0.0, 1.0}, {0.25, 0.75}});
  EXPECT_EQ(FormatAttentionLine(2, w),
            "{\"alpha\":{\"out.b\":[0.25,0.75]},\"round\":2,"
            "\"scores\":{\"out.b\":[0.0,1.0]}}");
}

TEST(SummaryCsvTest, OnlyEvaluatedRounds) {
  std::vector<RoundRecord> recs(3);
  recs[0].round = 1;
  recs[1].round = 2;
  recs[1].val_ppl = 12.5;
  recs[1].test_ppl = 13.0;
  recs[2].round = 3;
  recs[2].val_ppl = 0.1;
  recs[2].test_ppl = 11.0;
  EXPECT_EQ(FormatSummaryCsv(recs),
            "round,val_ppl,test_ppl\n2,12.5,13\n3,0.10000000000000001,11\n");
}

TEST(RunWriterTest, WritesAllOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "fedsim_writer_test";
  std::filesystem::remove_all(dir);
  SimConfig c;
  c.train_path = "t";
  c.valid_path = "v";
  c.test_path = "s";
  c.export_attention = true;
  {
    RunWriter w(dir / "nested", c);
    AttentionWeights att;
    att.layers.push_back({"w", {1.0}, {1.0}});
    w.Append(Sample(), att);
    SimulationResult result;
    result.records = {Sample()};
    result.final_params.Add("w", Tensor2(1, 2, 3.0));
    w.Finish(result);
  }
  const auto out = dir / "nested";
  EXPECT_EQ(ReadTextFile(out / "records.jsonl"),
            FormatRecordLine(Sample(), false) + "\n");
  EXPECT_EQ(ReadTextFile(out / "summary.csv"),
            "round,val_ppl,test_ppl\n4,101.25,99.5\n");
  EXPECT_NE(ReadTextFile(out / "attention.jsonl").find("\"alpha\""),
            std::string::npos);
  EXPECT_EQ(ReadParamSetFile(out / "checkpoint.bin").Get("w")(0, 1), 3.0);
  EXPECT_EQ(ReadTextFile(out / "config.txt"), FormatSimConfig(c));
  std::filesystem::remove_all(dir);
}

TEST(RunWriterTest, NoAttentionFileForAveragingStrategies) {
  const auto dir = std::filesystem::temp_directory_path() / "fedsim_writer_test2";
  std::filesystem::remove_all(dir);
  SimConfig c;
  c.export_attention = true;
  c.aggregator.strategy = Strategy::kFedAvg;
  { RunWriter w(dir, c); }
  EXPECT_FALSE(std::filesystem::exists(dir / "attention.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "records.jsonl"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fedsim
