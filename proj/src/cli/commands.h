// Copyright 2026 The cvdrisk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CVDRISK_CLI_COMMANDS_H_
#define CVDRISK_CLI_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvdrisk/cli.h"

namespace cvdrisk::cli {

using Path = std::filesystem::path;

// Parsed command line. Optional fields are set only when given, so they can
// override the config file.
struct Invocation {
  std::string command;

  // Global.
  std::optional<Path> config;
  std::optional<uint64_t> seed;
  std::optional<size_t> dim;

  // Provider.
  std::optional<std::string> provider;
  std::optional<Path> store;
  std::optional<std::string> endpoint;
  std::optional<uint64_t> timeout_ms;

  // Forest and split.
  std::optional<size_t> trees;
  std::optional<size_t> max_depth;
  std::optional<std::string> max_features;
  bool no_bootstrap = false;
  std::optional<size_t> min_samples_split;
  std::optional<double> train_fraction;
  bool stratified = false;
  unsigned threads = 0;

  // Tokenizer and verifier resources.
  std::optional<Path> vocab;
  std::optional<size_t> max_len;
  std::optional<Path> lexicon;

  // Command inputs and outputs.
  size_t n = 20;
  double margin = 8.0;
  std::optional<Path> input;
  std::optional<Path> output;
  std::optional<Path> embeddings;
  std::optional<Path> tokens;
  std::optional<Path> model;
  std::optional<Path> confusion;
  std::optional<Path> svg;
  std::vector<std::string> texts;
  std::optional<int> label;
  bool all_records = false;
  size_t k = 10;
  std::vector<Path> ratings;
  std::optional<Path> predictions;
};

// Config file first, then flags on top.
PipelineConfig ResolveConfig(const Invocation& inv);

// Each returns the process exit status; errors propagate as exceptions.
int CmdSynth(const Invocation& inv, std::ostream& out);
int CmdIngest(const Invocation& inv, std::ostream& out);
int CmdEmbed(const Invocation& inv, std::ostream& out);
int CmdTrain(const Invocation& inv, std::ostream& out);
int CmdPredict(const Invocation& inv, std::ostream& out);
int CmdEvaluate(const Invocation& inv, std::ostream& out);
int CmdImportance(const Invocation& inv, std::ostream& out);
int CmdVerify(const Invocation& inv, std::ostream& out);
int CmdReview(const Invocation& inv, std::ostream& out);

}  // namespace cvdrisk::cli

#endif  // CVDRISK_CLI_COMMANDS_H_
