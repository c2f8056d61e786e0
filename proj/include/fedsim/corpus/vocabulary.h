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

#ifndef FEDSIM_CORPUS_VOCABULARY_H_
#define FEDSIM_CORPUS_VOCABULARY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fedsim {

using TokenId = std::int32_t;

// Bijective token <-> id map. Id 0 is the unknown-word token and id 1 the
// end-of-sentence token; both are always present.
class Vocabulary {
 public:
  static constexpr TokenId kUnkId = 0;
  static constexpr TokenId kEosId = 1;
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::string_view kEosToken = "<eos>";

  // Keeps the (max_size - 2) most frequent non-special tokens; ties go to the
  // token seen first. max_size counts the two special tokens and must be at
  // least 2. Throws kData on empty input.
  static Vocabulary Build(std::span<const std::string> tokens,
                          std::size_t max_size);

  // Vocabulary holding exactly the specials followed by `tokens` in order.
  static Vocabulary FromTokenList(std::span<const std::string> tokens);

  std::size_t size() const { return id_to_token_.size(); }
  bool Contains(std::string_view token) const;
  // Out-of-vocabulary tokens map to kUnkId.
  TokenId Id(std::string_view token) const;
  // Throws kInvalidArgument for ids outside [0, size()).
  const std::string& Token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

 private:
  Vocabulary();
  void Append(std::string token);

  std::unordered_map<std::string, TokenId> token_to_id_;
  std::vector<std::string> id_to_token_;
};

}  // namespace fedsim

#endif  // FEDSIM_CORPUS_VOCABULARY_H_
