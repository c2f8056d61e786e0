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

#ifndef FEDSIM_CORPUS_SYNTHETIC_CORPUS_H_
#define FEDSIM_CORPUS_SYNTHETIC_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace fedsim {

// A seeded class-based Markov "language": word types are grouped into
// latent classes, each class emits its words with a Zipf law, and classes
// follow a sparse transition matrix. Output is whitespace-tokenized text with
// one sentence per line, so it can stand in for PTB-style corpora in tests
// and benchmarks.
struct SyntheticCorpusOptions {
  std::size_t num_word_types = 6000;
  std::size_t num_classes = 40;
  std::size_t successors_per_class = 4;
  double zipf_exponent = 1.1;
  double mean_sentence_len = 15.0;
  std::size_t train_tokens = 200000;
  std::size_t valid_tokens = 20000;
  std::size_t test_tokens = 20000;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::string train;
  std::string valid;
  std::string test;
};

// Token counts are approximate: generation stops at the first sentence end
// after the requested count (the "<eos>" markers are not counted).
SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusOptions& options);

// Writes train.txt, valid.txt and test.txt into `dir` (created if needed).
void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& dir);

}  // namespace fedsim

#endif  // FEDSIM_CORPUS_SYNTHETIC_CORPUS_H_
