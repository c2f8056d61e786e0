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

#ifndef FEDSIM_CORPUS_CORPUS_H_
#define FEDSIM_CORPUS_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/corpus/vocabulary.h"
#include "fedsim/numeric/rng.h"

namespace fedsim {

enum class Split { kTrain, kValid, kTest };

std::string_view SplitName(Split split);
// "train" / "valid" / "test"; anything else is a kConfig error.
Split ParseSplit(std::string_view text);

struct TokenStream {
  std::vector<TokenId> ids;
  Split split = Split::kTrain;
};

// Whitespace tokenization of pre-tokenized text. Every line, including a
// final line without a trailing newline, is terminated by an "<eos>" token.
std::vector<std::string> Tokenize(std::string_view text);

// Unknown tokens map to the UNK id, "<eos>" to the EOS id.
TokenStream Encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                   Split split = Split::kTrain);
std::vector<std::string> Decode(std::span<const TokenId> ids,
                                const Vocabulary& vocab);

// IID split of a training stream into client shards. The stream is cut into
// contiguous blocks of `block_len` tokens (a tail shorter than one block is
// dropped), the blocks are shuffled, and dealt round-robin to the shards.
struct Partition {
  std::vector<std::vector<TokenId>> shards;
  // Source block index of each block in each shard, in shard order. Block b
  // covers stream positions [b * block_len, (b + 1) * block_len).
  std::vector<std::vector<std::size_t>> shard_blocks;
  int block_len = 0;
  std::uint64_t seed = 0;

  std::size_t num_shards() const { return shards.size(); }
};

// Throws kData naming the required minimum when the stream holds fewer than
// k * block_len tokens.
Partition PartitionIid(const TokenStream& stream, int k, int block_len,
                       SeededRng& rng);

// One BPTT minibatch. Row b of inputs/targets occupies
// [b * seq_len, (b + 1) * seq_len); targets are inputs shifted by one token.
struct TokenBatch {
  int batch_size = 0;
  int seq_len = 0;
  std::vector<TokenId> inputs;
  std::vector<TokenId> targets;

  std::size_t num_tokens() const { return inputs.size(); }
};

// Splits the shard into `batch_size` contiguous rows of equal length and
// walks them in windows of `bptt_len` tokens. Leftover tokens are dropped.
// Requires shard.size() >= batch_size * (bptt_len + 1).
std::vector<TokenBatch> Batchify(std::span<const TokenId> shard,
                                 int batch_size, int bptt_len);

struct Corpus {
  Vocabulary vocab;
  TokenStream train;
  TokenStream valid;
  TokenStream test;

  const TokenStream& stream(Split split) const;
};

// Reads whole UTF-8 text file; kData on failure.
std::string ReadTextFile(const std::filesystem::path& path);

// Builds the vocabulary from the training file and encodes all three splits.
Corpus LoadCorpus(const std::filesystem::path& train_path,
                  const std::filesystem::path& valid_path,
                  const std::filesystem::path& test_path,
                  std::size_t max_vocab);

}  // namespace fedsim

#endif  // FEDSIM_CORPUS_CORPUS_H_
