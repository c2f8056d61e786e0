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

#include "fedsim/sim/sim_config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value,
                           std::string_view expected) {
  Fail(ErrorCode::kConfig, "config key '" + std::string(key) + "': '" +
                               std::string(value) + "' is not " +
                               std::string(expected));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value, "a number");
  }
  return out;
}

int ParseInt(std::string_view key, std::string_view value) {
  return ParseNumber<int>(key, value);
}

double ParseDouble(std::string_view key, std::string_view value) {
  const double v = ParseNumber<double>(key, value);
  if (!std::isfinite(v)) BadValue(key, value, "a finite number");
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  BadValue(key, value, "a boolean");
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

using Setter = std::function<void(SimConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const SimConfig&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto add = [&f](std::string key, Setter set, Getter get) {
      f.push_back({std::move(key), std::move(set), std::move(get)});
    };
    add("k_clients",
        [](SimConfig& c, auto k, auto v) { c.k_clients = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.k_clients); });
    add("fraction",
        [](SimConfig& c, auto k, auto v) { c.fraction = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.fraction); });
    add("rounds",
        [](SimConfig& c, auto k, auto v) { c.rounds = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.rounds); });
    add("strategy",
        [](SimConfig& c, auto, auto v) {
          c.aggregator.strategy = ParseStrategy(v);
        },
        [](const SimConfig& c) {
          return std::string(StrategyName(c.aggregator.strategy));
        });
    add("epsilon",
        [](SimConfig& c, auto k, auto v) {
          c.aggregator.epsilon = ParseDouble(k, v);
        },
        [](const SimConfig& c) { return FormatDouble(c.aggregator.epsilon); });
    add("norm_order",
        [](SimConfig& c, auto, auto v) {
          c.aggregator.norm_order = ParseNormOrder(v);
        },
        [](const SimConfig& c) {
          return std::to_string(static_cast<int>(c.aggregator.norm_order));
        });
    add("batch_size",
        [](SimConfig& c, auto k, auto v) { c.client.batch_size = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.client.batch_size); });
    add("local_epochs",
        [](SimConfig& c, auto k, auto v) {
          c.client.local_epochs = ParseInt(k, v);
        },
        [](const SimConfig& c) { return std::to_string(c.client.local_epochs); });
    add("learning_rate",
        [](SimConfig& c, auto k, auto v) {
          c.client.learning_rate = ParseDouble(k, v);
        },
        [](const SimConfig& c) { return FormatDouble(c.client.learning_rate); });
    add("momentum",
        [](SimConfig& c, auto k, auto v) { c.client.momentum = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.client.momentum); });
    add("clip_norm",
        [](SimConfig& c, auto k, auto v) { c.client.clip_norm = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.client.clip_norm); });
    add("dp_enabled",
        [](SimConfig& c, auto k, auto v) { c.dp.enabled = ParseBool(k, v); },
        [](const SimConfig& c) { return std::string(c.dp.enabled ? "true" : "false"); });
    add("dp_beta",
        [](SimConfig& c, auto k, auto v) { c.dp.beta = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.dp.beta); });
    add("dp_sigma",
        [](SimConfig& c, auto k, auto v) { c.dp.sigma = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.dp.sigma); });
    add("max_vocab",
        [](SimConfig& c, auto k, auto v) {
          c.max_vocab = ParseNumber<std::size_t>(k, v);
        },
        [](const SimConfig& c) { return std::to_string(c.max_vocab); });
    add("embed_dim",
        [](SimConfig& c, auto k, auto v) { c.model.embed_dim = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.model.embed_dim); });
    add("hidden_dim",
        [](SimConfig& c, auto k, auto v) { c.model.hidden_dim = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.model.hidden_dim); });
    add("num_layers",
        [](SimConfig& c, auto k, auto v) { c.model.num_layers = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.model.num_layers); });
    add("tied",
        [](SimConfig& c, auto k, auto v) { c.model.tied = ParseBool(k, v); },
        [](const SimConfig& c) { return std::string(c.model.tied ? "true" : "false"); });
    add("bptt_len",
        [](SimConfig& c, auto k, auto v) { c.model.bptt_len = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.model.bptt_len); });
    add("init_scale",
        [](SimConfig& c, auto k, auto v) { c.model.init_scale = ParseDouble(k, v); },
        [](const SimConfig& c) { return FormatDouble(c.model.init_scale); });
    add("block_len",
        [](SimConfig& c, auto k, auto v) { c.block_len = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.block_len); });
    add("train_path",
        [](SimConfig& c, auto, auto v) { c.train_path = std::string(v); },
        [](const SimConfig& c) { return c.train_path.string(); });
    add("valid_path",
        [](SimConfig& c, auto, auto v) { c.valid_path = std::string(v); },
        [](const SimConfig& c) { return c.valid_path.string(); });
    add("test_path",
        [](SimConfig& c, auto, auto v) { c.test_path = std::string(v); },
        [](const SimConfig& c) { return c.test_path.string(); });
    add("output_dir",
        [](SimConfig& c, auto, auto v) { c.output_dir = std::string(v); },
        [](const SimConfig& c) { return c.output_dir.string(); });
    add("master_seed",
        [](SimConfig& c, auto k, auto v) {
          c.master_seed = ParseNumber<std::uint64_t>(k, v);
        },
        [](const SimConfig& c) { return std::to_string(c.master_seed); });
    add("ppl_threshold",
        [](SimConfig& c, auto k, auto v) {
          if (v == "none") {
            c.ppl_threshold.reset();
          } else {
            c.ppl_threshold = ParseDouble(k, v);
          }
        },
        [](const SimConfig& c) {
          return c.ppl_threshold ? FormatDouble(*c.ppl_threshold)
                                 : std::string("none");
        });
    add("threshold_split",
        [](SimConfig& c, auto, auto v) { c.threshold_split = ParseSplit(v); },
        [](const SimConfig& c) { return std::string(SplitName(c.threshold_split)); });
    add("eval_every",
        [](SimConfig& c, auto k, auto v) { c.eval_every = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.eval_every); });
    add("eval_batch_size",
        [](SimConfig& c, auto k, auto v) { c.eval_batch_size = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.eval_batch_size); });
    add("threads",
        [](SimConfig& c, auto k, auto v) { c.threads = ParseInt(k, v); },
        [](const SimConfig& c) { return std::to_string(c.threads); });
    add("export_attention",
        [](SimConfig& c, auto k, auto v) { c.export_attention = ParseBool(k, v); },
        [](const SimConfig& c) {
          return std::string(c.export_attention ? "true" : "false");
        });
    add("record_timing",
        [](SimConfig& c, auto k, auto v) { c.record_timing = ParseBool(k, v); },
        [](const SimConfig& c) {
          return std::string(c.record_timing ? "true" : "false");
        });
    return f;
  }();
  return fields;
}

void ResolvePath(std::filesystem::path& path,
                 const std::filesystem::path& base_dir) {
  if (!path.empty() && path.is_relative() && !base_dir.empty()) {
    path = base_dir / path;
  }
}

}  // namespace

int SimConfig::ClientsPerRound() const {
  // A small tolerance keeps products like 0.7 * 10 from flooring to 6.
  const int m = static_cast<int>(std::floor(fraction * k_clients + 1e-9));
  return std::max(m, 1);
}

void SimConfig::Validate() const {
  if (k_clients < 1) Fail(ErrorCode::kConfig, "k_clients must be >= 1");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    Fail(ErrorCode::kConfig, "fraction must be in (0, 1]");
  }
  if (rounds < 1) Fail(ErrorCode::kConfig, "rounds must be >= 1");
  if (block_len < 1) Fail(ErrorCode::kConfig, "block_len must be >= 1");
  if (max_vocab < 3) Fail(ErrorCode::kConfig, "max_vocab must be >= 3");
  if (eval_every < 1) Fail(ErrorCode::kConfig, "eval_every must be >= 1");
  if (eval_batch_size < 1) Fail(ErrorCode::kConfig, "eval_batch_size must be >= 1");
  if (threads < 0) Fail(ErrorCode::kConfig, "threads must be >= 0");
  if (ppl_threshold && !(*ppl_threshold > 0.0)) {
    Fail(ErrorCode::kConfig, "ppl_threshold must be positive");
  }
  if (train_path.empty() || valid_path.empty() || test_path.empty()) {
    Fail(ErrorCode::kConfig,
         "train_path, valid_path and test_path must all be set");
  }
  aggregator.Validate();
  client.Validate();
  dp.Validate();
  GruLmConfig model_check = model;
  if (model_check.vocab_size == 0) model_check.vocab_size = 1;
  model_check.Validate();
}

SimConfig EffectiveConfig(SimConfig config) {
  if (config.aggregator.strategy == Strategy::kFedSgd) {
    const FedSgdSettings fedsgd = FedSgdRoundConfig();
    config.fraction = fedsgd.fraction;
    config.client.local_epochs = fedsgd.local_epochs;
    config.aggregator.strategy = fedsgd.aggregator;
  }
  return config;
}

void ApplyConfigValue(SimConfig& config, std::string_view key,
                      std::string_view value) {
  for (const Field& field : Fields()) {
    if (field.key == key) {
      field.set(config, key, value);
      return;
    }
  }
  Fail(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : Fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

SimConfig ParseSimConfig(std::string_view text,
                         const std::filesystem::path& base_dir) {
  SimConfig config;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kConfig, "config line " + std::to_string(line_no) +
                                   ": expected 'key = value'");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end()) {
      Fail(ErrorCode::kConfig, "config line " + std::to_string(line_no) +
                                   ": key '" + std::string(key) +
                                   "' already set on line " +
                                   std::to_string(it->second));
    }
    seen.emplace(std::string(key), line_no);
    ApplyConfigValue(config, key, value);
  }
  ResolvePath(config.train_path, base_dir);
  ResolvePath(config.valid_path, base_dir);
  ResolvePath(config.test_path, base_dir);
  ResolvePath(config.output_dir, base_dir);
  return config;
}

SimConfig LoadSimConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  return ParseSimConfig(text, path.parent_path());
}

std::string FormatSimConfig(const SimConfig& config) {
  std::string out;
  for (const Field& field : Fields()) {
    out += field.key + " = " + field.get(config) + "\n";
  }
  return out;
}

}  // namespace fedsim
