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

// Command-line front end: run, sweep, eval and synth subcommands.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsim/common/error.h"
#include "fedsim/corpus/synthetic_corpus.h"
#include "fedsim/model/gru_lm.h"
#include "fedsim/model/param_io.h"
#include "fedsim/sim/records.h"
#include "fedsim/sim/sim_config.h"
#include "fedsim/sim/simulator.h"

namespace fedsim {
namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::string output_dir;
  bool quiet = false;
};

std::pair<std::string, std::string> SplitAssignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    Fail(ErrorCode::kConfig, "expected key=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

SimConfig BuildConfig(const CommonOptions& opts) {
  SimConfig config = LoadSimConfig(opts.config_path);
  for (const auto& assignment : opts.overrides) {
    const auto [key, value] = SplitAssignment(assignment);
    ApplyConfigValue(config, key, value);
  }
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  config.Validate();
  return config;
}

std::string FormatValue(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// "a..b" or "a..b:step" (inclusive), or a comma-separated list. Ranges whose
// endpoints are integers default to step 1, others to step 0.1.
std::vector<std::string> ExpandValues(const std::string& range_text) {
  const auto dots = range_text.find("..");
  if (dots == std::string::npos) {
    std::vector<std::string> out;
    std::stringstream in(range_text);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) Fail(ErrorCode::kConfig, "empty sweep value list");
    return out;
  }
  std::string hi_text = range_text.substr(dots + 2);
  std::optional<double> step;
  if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
    step = std::stod(hi_text.substr(colon + 1));
    hi_text = hi_text.substr(0, colon);
  }
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = std::stod(range_text.substr(0, dots));
    hi = std::stod(hi_text);
  } catch (const std::exception&) {
    Fail(ErrorCode::kConfig, "bad sweep range '" + range_text + "'");
  }
  if (!step) {
    const bool integral = lo == std::floor(lo) && hi == std::floor(hi) &&
                          range_text.find('.') == dots;
    step = integral ? 1.0 : 0.1;
  }
  if (!(*step > 0.0) || hi < lo) {
    Fail(ErrorCode::kConfig, "bad sweep range '" + range_text + "'");
  }
  std::vector<std::string> out;
  const int count = static_cast<int>(std::floor((hi - lo) / *step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(FormatValue(lo + i * *step));
  return out;
}

void PrintRound(const RoundRecord& r) {
  std::cout << "round " << r.round;
  if (r.val_ppl) std::cout << "  val_ppl " << FormatValue(*r.val_ppl);
  if (r.test_ppl) std::cout << "  test_ppl " << FormatValue(*r.test_ppl);
  std::cout << "  train_loss " << FormatValue(r.mean_train_loss) << "  "
            << FormatValue(r.wall_seconds) << "s\n"
            << std::flush;
}

SimulationResult RunAndWrite(const SimConfig& config, const Corpus& corpus,
                             bool quiet) {
  RunWriter writer(config.output_dir, EffectiveConfig(config));
  SimulationResult result = RunSimulation(
      config, corpus,
      [&](const RoundRecord& r, const std::optional<AttentionWeights>& att) {
        writer.Append(r, att);
        if (!quiet) PrintRound(r);
      });
  writer.Finish(result);
  return result;
}

void PrintSummary(const SimulationResult& result, const SimConfig& config) {
  std::cout << "rounds completed " << result.records.size();
  if (result.stopped_early) std::cout << " (threshold reached)";
  std::cout << "\n";
  if (result.best_round) {
    std::cout << "best validation round " << *result.best_round;
    if (result.best_test_ppl) {
      std::cout << "  test_ppl " << FormatValue(*result.best_test_ppl);
    }
    std::cout << "\n";
  }
  if (config.ppl_threshold) {
    const auto hit = RoundsToThreshold(result.records, *config.ppl_threshold,
                                       config.threshold_split);
    std::cout << "rounds to threshold "
              << (hit ? std::to_string(*hit) : std::string("not reached"))
              << "\n";
  }
  std::cout << "outputs in " << config.output_dir.string() << "\n";
}

int CmdRun(const CommonOptions& opts) {
  const SimConfig config = BuildConfig(opts);
  const Corpus corpus = LoadCorpus(config.train_path, config.valid_path,
                                   config.test_path, config.max_vocab);
  const SimulationResult result = RunAndWrite(config, corpus, opts.quiet);
  PrintSummary(result, config);
  return 0;
}

int CmdSweep(const CommonOptions& opts, const std::string& vary) {
  const SimConfig base = BuildConfig(opts);
  const auto [key, range_text] = SplitAssignment(vary);
  const std::vector<std::string> values = ExpandValues(range_text);
  // Validate every point before running any of them.
  std::vector<SimConfig> configs;
  for (const auto& value : values) {
    SimConfig c = base;
    ApplyConfigValue(c, key, value);
    c.output_dir = base.output_dir / (key + "=" + value);
    c.Validate();
    configs.push_back(std::move(c));
  }
  const Corpus corpus = LoadCorpus(base.train_path, base.valid_path,
                                   base.test_path, base.max_vocab);
  std::ostringstream table;
  table << key << ",rounds,best_round,best_test_ppl,final_val_ppl,"
        << "final_test_ppl,rounds_to_threshold\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!opts.quiet) std::cout << "== " << key << "=" << values[i] << "\n";
    const SimulationResult r = RunAndWrite(configs[i], corpus, opts.quiet);
    const RoundRecord& last = r.records.back();
    std::optional<int> hit;
    if (configs[i].ppl_threshold) {
      hit = RoundsToThreshold(r.records, *configs[i].ppl_threshold,
                              configs[i].threshold_split);
    }
    table << values[i] << "," << r.records.size() << ","
          << (r.best_round ? std::to_string(*r.best_round) : "") << ","
          << (r.best_test_ppl ? FormatValue(*r.best_test_ppl) : "") << ","
          << (last.val_ppl ? FormatValue(*last.val_ppl) : "") << ","
          << (last.test_ppl ? FormatValue(*last.test_ppl) : "") << ","
          << (hit ? std::to_string(*hit) : "") << "\n";
  }
  std::filesystem::create_directories(base.output_dir);
  std::ofstream(base.output_dir / "sweep.csv", std::ios::binary) << table.str();
  std::cout << table.str();
  return 0;
}

int CmdEval(const CommonOptions& opts, const std::string& checkpoint,
            const std::string& split_name) {
  const SimConfig config = BuildConfig(opts);
  const Split split = ParseSplit(split_name);
  const Corpus corpus = LoadCorpus(config.train_path, config.valid_path,
                                   config.test_path, config.max_vocab);
  const ParamSet params = ReadParamSetFile(checkpoint);
  const GruLmConfig model = InferConfig(params, config.model.bptt_len);
  if (static_cast<std::size_t>(model.vocab_size) != corpus.vocab.size()) {
    Fail(ErrorCode::kData,
         "checkpoint vocabulary size " + std::to_string(model.vocab_size) +
             " does not match corpus vocabulary size " +
             std::to_string(corpus.vocab.size()));
  }
  const double ppl =
      Evaluate(params, corpus.stream(split), model, config.eval_batch_size);
  std::cout << SplitName(split) << "_ppl " << FormatValue(ppl) << "\n";
  return 0;
}

int CmdSynth(const std::string& out_dir, const SyntheticCorpusOptions& opts) {
  WriteSyntheticCorpus(GenerateSyntheticCorpus(opts), out_dir);
  std::cout << "wrote train.txt, valid.txt, test.txt to " << out_dir << "\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Federated language-model simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "Config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", common.overrides, "Override a config key (key=value)");
    cmd->add_option("--output-dir", common.output_dir, "Override output_dir");
    cmd->add_flag("-q,--quiet", common.quiet, "Suppress per-round output");
  };

  auto* run = app.add_subcommand("run", "Run one simulation");
  add_common(run);

  std::string vary;
  auto* sweep = app.add_subcommand("sweep", "Run one simulation per value of a key");
  add_common(sweep);
  sweep->add_option("--vary", vary, "key=lo..hi[:step] or key=v1,v2,...")
      ->required();

  std::string checkpoint;
  std::string split = "test";
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint, "ParamSet file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--split", split, "train, valid or test");

  std::string synth_dir;
  SyntheticCorpusOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Write a synthetic text corpus");
  synth->add_option("--out", synth_dir, "Output directory")->required();
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--types", synth_opts.num_word_types, "Word types");
  synth->add_option("--train-tokens", synth_opts.train_tokens, "Training tokens");
  synth->add_option("--valid-tokens", synth_opts.valid_tokens, "Validation tokens");
  synth->add_option("--test-tokens", synth_opts.test_tokens, "Test tokens");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCodeFor(ErrorCode::kConfig);
  }

  try {
    if (*run) return CmdRun(common);
    if (*sweep) return CmdSweep(common, vary);
    if (*eval) return CmdEval(common, checkpoint, split);
    if (*synth) return CmdSynth(synth_dir, synth_opts);
  } catch (const Error& e) {
    std::cerr << "fedsim: " << ErrorCodeName(e.code()) << ": " << e.what()
              << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "fedsim: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace fedsim

int main(int argc, char** argv) { return fedsim::Main(argc, argv); }
