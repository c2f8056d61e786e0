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
#include <string>
#include <vector>

#include "fedsim/client/client_trainer.h"
#include "fedsim/common/error.h"
#include "fedsim/model/gru_lm.h"
#include "gtest/gtest.h"
#include "testing/test_util.h"

namespace fedsim {
namespace {

GruLmConfig TinyModel() {
  GruLmConfig c;
  c.vocab_size = 12;
  c.embed_dim = 4;
  c.hidden_dim = 4;
  c.bptt_len = 4;
  return c;
}

std::vector<TokenId> RandomShard(std::size_t n, int vocab, SeededRng& rng) {
  std::vector<TokenId> shard(n);
  for (auto& t : shard) t = static_cast<TokenId>(rng.UniformInt(vocab));
  return shard;
}

ClientConfig Config(int epochs, double lr, double momentum, double clip) {
  ClientConfig cfg;
  cfg.batch_size = 2;
  cfg.local_epochs = epochs;
  cfg.learning_rate = lr;
  cfg.momentum = momentum;
  cfg.clip_norm = clip;
  return cfg;
}

TEST(ClientUpdateTest, ZeroEpochsReturnServerParams) {
  SeededRng rng(1);
  const GruLmConfig m = TinyModel();
  const ParamSet server = InitParams(m, rng).params();
  const auto shard = RandomShard(60, m.vocab_size, rng);
  const ClientUpdate u = RunClientUpdate(3, server, m, shard, Config(0, 0.5, 0.9, 5));
  EXPECT_EQ(u.params, server);
  EXPECT_EQ(u.client_id, 3);
  EXPECT_EQ(u.num_samples, 60u);
  EXPECT_TRUE(std::isnan(u.final_loss()));
}

TEST(ClientUpdateTest, SingleStepIsNegativeLearningRateTimesGradient) {
  SeededRng rng(2);
  const GruLmConfig m = TinyModel();
  const ParamSet server = testing::RandomModel(m, rng).params();
  const auto shard = RandomShard(2 * (m.bptt_len + 1), m.vocab_size, rng);
  const ClientConfig cfg = Config(1, 0.3, 0.9, 0.0);
  const TokenBatch batch = Batchify(shard, 2, m.bptt_len).at(0);
  const GruLmParams params(m, server);
  const ParamSet grad =
      Backward(params, Forward(params, batch.inputs, 2).cache, batch.targets);
  const ClientUpdate u = RunClientUpdate(0, server, m, shard, cfg);
  for (std::size_t k = 0; k < server.size(); ++k) {
    const auto before = server[k].tensor.values();
    const auto after = u.params[k].tensor.values();
    const auto g = grad[k].tensor.values();
    for (std::size_t i = 0; i < before.size(); ++i) {
      EXPECT_EQ(after[i], before[i] - 0.3 * g[i]) << server[k].name << i;
    }
  }
  EXPECT_EQ(u.epoch_losses.size(), 1u);
}

TEST(ClientUpdateTest, NoMomentumMatchesPlainSgdOracle) {
  SeededRng rng(3);
  const GruLmConfig m = TinyModel();
  const ParamSet server = testing::RandomModel(m, rng).params();
  // Two batches of 2 x 4.
  const auto shard = RandomShard(2 * (2 * m.bptt_len + 1), m.vocab_size, rng);
  ASSERT_EQ(Batchify(shard, 2, m.bptt_len).size(), 2u);
  const ClientConfig cfg = Config(3, 0.2, 0.0, 0.0);
  const ClientUpdate u = RunClientUpdate(0, server, m, shard, cfg);
  EXPECT_LT(testing::MaxAbsDiff(u.params, testing::OracleTrain(m, server, shard, cfg)),
            1e-14);
}

TEST(ClientUpdateTest, MomentumAndClippingMatchOracle) {
  SeededRng rng(4);
  const GruLmConfig m = TinyModel();
  const ParamSet server = testing::RandomModel(m, rng, 1.0).params();
  const auto shard = RandomShard(100, m.vocab_size, rng);
  // A tight clip so that clipping is active on most steps.
  const ClientConfig cfg = Config(2, 0.1, 0.9, 0.05);
  const ClientUpdate u = RunClientUpdate(0, server, m, shard, cfg);
  EXPECT_LT(testing::MaxAbsDiff(u.params, testing::OracleTrain(m, server, shard, cfg)),
            1e-13);
}

TEST(ClientUpdateTest, Deterministic) {
  SeededRng rng(5);
  const GruLmConfig m = TinyModel();
  const ParamSet server = InitParams(m, rng).params();
  const auto shard = RandomShard(200, m.vocab_size, rng);
  const ClientConfig cfg = Config(2, 0.5, 0.9, 5.0);
  const ClientUpdate a = RunClientUpdate(1, server, m, shard, cfg);
  const ClientUpdate b = RunClientUpdate(1, server, m, shard, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
}

TEST(ClientUpdateTest, EpochLossMostlyDecreases) {
  SeededRng rng(6);
  int monotone = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    const GruLmConfig m = TinyModel();
    SeededRng init = rng.Derive(t);
    const ParamSet server = InitParams(m, init).params();
    const auto shard = RandomShard(120, 5, init);
    const ClientUpdate u =
        RunClientUpdate(0, server, m, shard, Config(4, 0.1, 0.0, 5.0));
    bool ok = true;
    for (std::size_t e = 1; e < u.epoch_losses.size(); ++e) {
      ok = ok && u.epoch_losses[e] <= u.epoch_losses[e - 1];
    }
    monotone += ok;
  }
  EXPECT_GE(monotone, trials * 9 / 10);
}

TEST(ClientUpdateTest, ShortShardIsDataError) {
  const GruLmConfig m = TinyModel();
  const ParamSet server = ZeroParamSet(m);
  const std::vector<TokenId> shard(5, 1);
  try {
    RunClientUpdate(0, server, m, shard, Config(1, 0.1, 0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(ClientUpdateTest, NonFiniteLossNamesClientAndBatch) {
  const GruLmConfig m = TinyModel();
  ParamSet server = ZeroParamSet(m);
  server.GetMutable(kOutBiasName)(0, 3) = std::nan("");
  SeededRng rng(7);
  const auto shard = RandomShard(40, m.vocab_size, rng);
  try {
    RunClientUpdate(7, server, m, shard, Config(1, 0.1, 0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("client 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch 0"), std::string::npos) << msg;
  }
}

TEST(ClientConfigTest, Validation) {
  EXPECT_THROW(Config(-1, 0.1, 0.0, 0.0).Validate(), Error);
  EXPECT_THROW(Config(1, 0.0, 0.0, 0.0).Validate(), Error);
  EXPECT_THROW(Config(1, 0.1, 1.0, 0.0).Validate(), Error);
  ClientConfig c = Config(1, 0.1, 0.0, 0.0);
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), Error);
}

ParamSet LargeParams() {
  ParamSet p;
  p.Add("a", Tensor2(200, 250, 0.5));
  p.Add("b", Tensor2(1, 3, -1.0));
  return p;
}

TEST(DpNoiseTest, DisabledAndZeroSigmaAreIdentity) {
  const ParamSet p = LargeParams();
  SeededRng rng(1);
  DpConfig dp;
  dp.beta = 0.05;
  EXPECT_EQ(AddDpNoise(p, p, dp, rng), p);
  dp.enabled = true;
  dp.sigma = 0.0;
  EXPECT_EQ(AddDpNoise(p, p, dp, rng), p);
  EXPECT_EQ(rng.draws(), 0u);
}

TEST(DpNoiseTest, NoiseStdMatchesBetaTimesSigma) {
  const ParamSet p = LargeParams();
  SeededRng rng(77);
  DpConfig dp;
  dp.enabled = true;
  dp.beta = 0.05;
  dp.sigma = 1.0;
  const ParamSet noisy = AddDpNoise(p, p, dp, rng);
  double sum = 0.0;
  double sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto a = p[k].tensor.values();
    const auto b = noisy[k].tensor.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = b[i] - a[i];
      sum += d;
      sum2 += d * d;
      ++n;
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_NEAR(sd, 0.05, 0.05 * 0.05);
  EXPECT_NEAR(mean, 0.0, 0.001);
}

TEST(DpNoiseTest, SameStreamSameNoise) {
  const ParamSet p = LargeParams();
  DpConfig dp;
  dp.enabled = true;
  dp.beta = 0.01;
  SeededRng a(5);
  SeededRng b(5);
  EXPECT_EQ(AddDpNoise(p, p, dp, a), AddDpNoise(p, p, dp, b));
}

TEST(DpNoiseTest, RejectsBadConfigAndShapes) {
  const ParamSet p = LargeParams();
  SeededRng rng(1);
  DpConfig dp;
  dp.enabled = true;
  dp.beta = 1.5;
  try {
    AddDpNoise(p, p, dp, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  dp.beta = 0.1;
  ParamSet other;
  other.Add("a", Tensor2(1, 1));
  EXPECT_THROW(AddDpNoise(p, other, dp, rng), Error);
}

}  // namespace
}  // namespace fedsim
