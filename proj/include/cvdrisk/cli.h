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


// Command-line pipeline: synth, ingest, embed, train, predict, evaluate,
// importance, verify and review.

#ifndef CVDRISK_CLI_H_
#define CVDRISK_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cvdrisk/corpus.h"
#include "cvdrisk/embed.h"
#include "cvdrisk/forest.h"
#include "cvdrisk/tokenizer.h"

namespace cvdrisk::cli {

// Everything a run needs, loadable from one JSON file:
//
//   {
//     "provider": {"kind": "mock", "dim": 768, "seed": 42, "path": null,
//                  "endpoint": null, "timeout_ms": 10000},
//     "forest": {"n_estimators": 100, "max_depth": null, "max_features": "all",
//                "bootstrap": true, "seed": 42, "min_samples_split": 2},
//     "split": {"train_fraction": 0.7, "seed": 42, "stratified": false},
//     "vocab_path": null, "lexicon_path": null, "max_len": 128
//   }
//
// All keys are optional. Relative paths resolve against the config file's
// directory. Unknown keys are rejected.
struct PipelineConfig {
  ProviderConfig provider;
  bool provider_dim_set = false;  // dim given explicitly rather than defaulted
  ForestConfig forest;
  SplitSpec split;
  std::optional<std::filesystem::path> vocab_path;
  std::optional<std::filesystem::path> lexicon_path;
  size_t max_len = kDefaultMaxLen;
};

// Throws Error(kParse) on unknown keys or wrong types.
PipelineConfig ConfigFromJson(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
PipelineConfig LoadConfig(const std::filesystem::path& path);
nlohmann::ordered_json ConfigToJson(const PipelineConfig& cfg);

// Runs one invocation. args excludes the program name. Data goes to out,
// diagnostics to err. Returns 0 on success, 1 on an operation error and 2 on
// a usage error.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand names in declaration order.
std::vector<std::string> SubcommandNames();

// Help text of one subcommand, or of the top level when name is empty.
std::string HelpText(std::string_view name);

// Long flag names (with leading dashes) accepted by one subcommand, including
// the global ones.
std::vector<std::string> FlagNames(std::string_view name);

}  // namespace cvdrisk::cli

#endif  // CVDRISK_CLI_H_
