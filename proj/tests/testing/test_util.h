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

#ifndef FEDSIM_TESTS_TESTING_TEST_UTIL_H_
#define FEDSIM_TESTS_TESTING_TEST_UTIL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedsim/client/client_trainer.h"
#include "fedsim/corpus/corpus.h"
#include "fedsim/model/gru_lm.h"
#include "fedsim/numeric/param_set.h"
#include "fedsim/numeric/rng.h"

namespace fedsim::testing {

// Tensor with entries uniform in [-scale, scale].
Tensor2 RandomTensor(int rows, int cols, SeededRng& rng, double scale = 1.0);

// ParamSet with the given layer shapes and uniform entries.
ParamSet RandomParamSet(const std::vector<std::pair<int, int>>& shapes,
                        SeededRng& rng, double scale = 1.0);

// Model parameters with every entry, biases included, uniform in
// [-scale, scale].
GruLmParams RandomModel(const GruLmConfig& config, SeededRng& rng,
                        double scale = 0.5);

TokenBatch RandomBatch(int vocab_size, int batch_size, int seq_len,
                       SeededRng& rng);

// Small random model config: V in [2, 30], d = h in [1, 10], one or two
// layers, seq_len in [1, 6].
GruLmConfig RandomSmallConfig(SeededRng& rng, bool tied);

struct GradientCheck {
  double max_rel_error = 0.0;
  std::string worst_entry;
  int worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares Backward() against central differences of BatchLoss() on every
// coordinate. Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheck CheckGradient(const GruLmParams& params, const TokenBatch& batch,
                            double step = 1e-5, double floor = 1e-6);

// Reference local training written directly against Forward/Backward:
// v <- momentum * v + clip(g), p <- p - lr * v over Batchify order.
ParamSet OracleTrain(const GruLmConfig& model, ParamSet params,
                     std::span<const TokenId> shard, const ClientConfig& cfg);

// Deterministic text of `lines` sentences drawn from a small word list.
std::string TinyText(int lines, std::uint64_t seed, int words = 12);

double MaxAbsDiff(const ParamSet& a, const ParamSet& b);

}  // namespace fedsim::testing

#endif  // FEDSIM_TESTS_TESTING_TEST_UTIL_H_
