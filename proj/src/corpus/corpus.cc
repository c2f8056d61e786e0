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

#include "fedsim/corpus/corpus.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid") return Split::kValid;
  if (text == "test") return Split::kTest;
  Fail(ErrorCode::kConfig, "unknown split '" + std::string(text) +
                               "' (expected train, valid or test)");
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool has_newline = end != std::string_view::npos;
    if (!has_newline) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && IsSpace(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !IsSpace(line[j])) ++j;
      if (j > i) tokens.emplace_back(line.substr(i, j - i));
      i = j;
    }
    tokens.emplace_back(Vocabulary::kEosToken);
    pos = end + 1;
  }
  return tokens;
}

TokenStream Encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                   Split split) {
  TokenStream stream;
  stream.split = split;
  stream.ids.reserve(tokens.size());
  for (const auto& t : tokens) stream.ids.push_back(vocab.Id(t));
  return stream;
}

std::vector<std::string> Decode(std::span<const TokenId> ids,
                                const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId id : ids) tokens.push_back(vocab.Token(id));
  return tokens;
}

Partition PartitionIid(const TokenStream& stream, int k, int block_len,
                       SeededRng& rng) {
  if (k < 1) Fail(ErrorCode::kConfig, "client count must be >= 1");
  if (block_len < 1) Fail(ErrorCode::kConfig, "block length must be >= 1");
  const std::size_t required = static_cast<std::size_t>(k) * block_len;
  if (stream.ids.size() < required) {
    Fail(ErrorCode::kData,
         "training stream has " + std::to_string(stream.ids.size()) +
             " tokens; partitioning into " + std::to_string(k) +
             " shards of " + std::to_string(block_len) +
             "-token blocks requires at least " + std::to_string(required));
  }
  const std::size_t num_blocks = stream.ids.size() / block_len;
  std::vector<std::size_t> order(num_blocks);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = num_blocks; i > 1; --i) {
    const std::size_t j = rng.UniformInt(i);
    std::swap(order[i - 1], order[j]);
  }

  Partition partition;
  partition.block_len = block_len;
  partition.seed = rng.seed();
  partition.shards.resize(k);
  partition.shard_blocks.resize(k);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    const std::size_t shard = i % k;
    const std::size_t block = order[i];
    const auto first = stream.ids.begin() + block * block_len;
    partition.shards[shard].insert(partition.shards[shard].end(), first,
                                   first + block_len);
    partition.shard_blocks[shard].push_back(block);
  }
  return partition;
}

std::vector<TokenBatch> Batchify(std::span<const TokenId> shard,
                                 int batch_size, int bptt_len) {
  if (batch_size < 1 || bptt_len < 1) {
    Fail(ErrorCode::kConfig, "batch size and BPTT length must be >= 1");
  }
  const std::size_t minimum =
      static_cast<std::size_t>(batch_size) * (bptt_len + 1);
  if (shard.size() < minimum) {
    Fail(ErrorCode::kData, "shard has " + std::to_string(shard.size()) +
                               " tokens; batching needs at least " +
                               std::to_string(minimum));
  }
  const std::size_t row_len = shard.size() / batch_size;
  const std::size_t num_batches = (row_len - 1) / bptt_len;
  std::vector<TokenBatch> batches(num_batches);
  for (std::size_t n = 0; n < num_batches; ++n) {
    TokenBatch& batch = batches[n];
    batch.batch_size = batch_size;
    batch.seq_len = bptt_len;
    batch.inputs.resize(static_cast<std::size_t>(batch_size) * bptt_len);
    batch.targets.resize(batch.inputs.size());
    for (int b = 0; b < batch_size; ++b) {
      const std::size_t row_start = b * row_len + n * bptt_len;
      for (int t = 0; t < bptt_len; ++t) {
        const std::size_t out = static_cast<std::size_t>(b) * bptt_len + t;
        batch.inputs[out] = shard[row_start + t];
        batch.targets[out] = shard[row_start + t + 1];
      }
    }
  }
  return batches;
}

const TokenStream& Corpus::stream(Split split) const {
  switch (split) {
    case Split::kTrain:
      return train;
    case Split::kValid:
      return valid;
    case Split::kTest:
      return test;
  }
  return train;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kData, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kData, "error reading '" + path.string() + "'");
  return buffer.str();
}

Corpus LoadCorpus(const std::filesystem::path& train_path,
                  const std::filesystem::path& valid_path,
                  const std::filesystem::path& test_path,
                  std::size_t max_vocab) {
  const auto train_tokens = Tokenize(ReadTextFile(train_path));
  const auto valid_tokens = Tokenize(ReadTextFile(valid_path));
  const auto test_tokens = Tokenize(ReadTextFile(test_path));
  Corpus corpus{Vocabulary::Build(train_tokens, max_vocab), {}, {}, {}};
  corpus.train = Encode(train_tokens, corpus.vocab, Split::kTrain);
  corpus.valid = Encode(valid_tokens, corpus.vocab, Split::kValid);
  corpus.test = Encode(test_tokens, corpus.vocab, Split::kTest);
  return corpus;
}

}  // namespace fedsim
