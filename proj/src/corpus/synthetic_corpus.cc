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

#include "fedsim/corpus/synthetic_corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <vector>

#include "fedsim/common/error.h"
#include "fedsim/numeric/rng.h"

namespace fedsim {
namespace {

// Inverse-CDF sampler over a fixed discrete distribution.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
      total += w;
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }

  std::size_t Sample(SeededRng& rng) const {
    const double u = rng.NextUniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

// Two-letter syllables give fixed-width words, so distinct indices never
// collide.
std::string PseudoWord(std::size_t index) {
  static constexpr std::string_view kConsonants = "bdfghklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
  std::size_t syllables = 2;
  std::size_t capacity = kSyllables * kSyllables;
  std::size_t offset = index;
  while (offset >= capacity) {
    offset -= capacity;
    ++syllables;
    capacity *= kSyllables;
  }
  std::string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    const std::size_t syllable = offset % kSyllables;
    offset /= kSyllables;
    word += kConsonants[syllable / kVowels.size()];
    word += kVowels[syllable % kVowels.size()];
  }
  return word;
}

struct Language {
  std::vector<std::string> words;
  std::vector<Categorical> emissions;         // per class, over class_words
  std::vector<std::vector<std::size_t>> class_words;
  std::vector<Categorical> transitions;       // per class, over classes
  Categorical start{std::vector<double>{1.0}};
};

Language BuildLanguage(const SyntheticCorpusOptions& options, SeededRng rng) {
  const std::size_t n_classes = options.num_classes;
  Language lang;
  lang.words.reserve(options.num_word_types);
  for (std::size_t i = 0; i < options.num_word_types; ++i) {
    lang.words.push_back(PseudoWord(i));
  }

  lang.class_words.resize(n_classes);
  for (std::size_t w = 0; w < options.num_word_types; ++w) {
    lang.class_words[w < n_classes ? w : rng.UniformInt(n_classes)].push_back(w);
  }
  for (const auto& members : lang.class_words) {
    std::vector<double> weights(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      weights[r] = 1.0 / std::pow(static_cast<double>(r + 1),
                                  options.zipf_exponent);
    }
    lang.emissions.emplace_back(weights);
  }

  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<double> weights(n_classes, 0.02 / n_classes);
    for (std::size_t s = 0; s < options.successors_per_class; ++s) {
      weights[rng.UniformInt(n_classes)] += -std::log(1.0 - rng.NextUniform());
    }
    lang.transitions.emplace_back(weights);
  }
  std::vector<double> start(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    start[c] = 1.0 / static_cast<double>(c + 1);
  }
  lang.start = Categorical(start);
  return lang;
}

std::string GenerateText(const Language& lang, double mean_len,
                         std::size_t target_tokens, SeededRng rng) {
  std::string text;
  std::size_t produced = 0;
  const double stop_prob = 1.0 / std::max(mean_len, 2.0);
  while (produced < target_tokens) {
    std::size_t cls = lang.start.Sample(rng);
    std::size_t len = 0;
    while (true) {
      const auto& members = lang.class_words[cls];
      const std::size_t word = members[lang.emissions[cls].Sample(rng)];
      if (len > 0) text += ' ';
      text += lang.words[word];
      ++len;
      ++produced;
      if (len >= 3 && rng.NextUniform() < stop_prob) break;
      cls = lang.transitions[cls].Sample(rng);
    }
    text += '\n';
  }
  return text;
}

}  // namespace

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusOptions& options) {
  if (options.num_classes == 0 || options.num_word_types < options.num_classes) {
    Fail(ErrorCode::kConfig,
         "synthetic corpus needs at least one word type per class");
  }
  SeededRng root(options.seed);
  const Language lang = BuildLanguage(options, root.Derive("language"));
  return SyntheticCorpus{
      GenerateText(lang, options.mean_sentence_len, options.train_tokens,
                   root.Derive("train")),
      GenerateText(lang, options.mean_sentence_len, options.valid_tokens,
                   root.Derive("valid")),
      GenerateText(lang, options.mean_sentence_len, options.test_tokens,
                   root.Derive("test")),
  };
}

void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::array<std::pair<const char*, const std::string*>, 3> files = {{
      {"train.txt", &corpus.train},
      {"valid.txt", &corpus.valid},
      {"test.txt", &corpus.test},
  }};
  for (const auto& [name, text] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << *text;
    if (!out) {
      Fail(ErrorCode::kData, "cannot write '" + (dir / name).string() + "'");
    }
  }
}

}  // namespace fedsim
