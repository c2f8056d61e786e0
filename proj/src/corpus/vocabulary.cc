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

#include "fedsim/corpus/vocabulary.h"

#include <algorithm>

#include "fedsim/common/error.h"

namespace fedsim {

Vocabulary::Vocabulary() {
  Append(std::string(kUnkToken));
  Append(std::string(kEosToken));
}

void Vocabulary::Append(std::string token) {
  const auto id = static_cast<TokenId>(id_to_token_.size());
  token_to_id_.emplace(token, id);
  id_to_token_.push_back(std::move(token));
}

Vocabulary Vocabulary::Build(std::span<const std::string> tokens,
                             std::size_t max_size) {
  if (tokens.empty()) {
    Fail(ErrorCode::kData, "cannot build a vocabulary from empty text");
  }
  if (max_size < 2) {
    Fail(ErrorCode::kConfig, "vocabulary size must be at least 2 (specials)");
  }
  struct Count {
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string_view, Count> counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == kUnkToken || t == kEosToken) continue;
    auto [it, inserted] = counts.try_emplace(t, Count{0, i});
    ++it->second.count;
  }
  std::vector<std::pair<std::string_view, Count>> ranked(counts.begin(),
                                                         counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });
  const std::size_t keep = std::min(ranked.size(), max_size - 2);
  Vocabulary vocab;
  for (std::size_t i = 0; i < keep; ++i) {
    vocab.Append(std::string(ranked[i].first));
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokenList(std::span<const std::string> tokens) {
  Vocabulary vocab;
  for (const auto& t : tokens) {
    if (vocab.Contains(t)) {
      Fail(ErrorCode::kInvalidArgument, "duplicate vocabulary token '" + t + "'");
    }
    vocab.Append(t);
  }
  return vocab;
}

bool Vocabulary::Contains(std::string_view token) const {
  return token_to_id_.find(std::string(token)) != token_to_id_.end();
}

TokenId Vocabulary::Id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::Token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

}  // namespace fedsim
