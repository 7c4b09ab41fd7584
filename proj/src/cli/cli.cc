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


#include <CLI11.hpp>
#include <functional>
#include <map>
#include <memory>
#include <ostream>

#include "commands.h"
#include "cvdrisk/error.h"

namespace cvdrisk::cli {
namespace {

template <typename T>
CLI::Option* Opt(CLI::App* app, const std::string& name, std::optional<T>& target,
                 const std::string& desc) {
  return app->add_option_function<T>(
      name, [&target](const T& v) { target = v; }, desc);
}

void AddGlobal(CLI::App* app, Invocation& inv) {
  Opt(app, "--config", inv.config, "Pipeline config JSON; flags override its fields");
  Opt(app, "--seed", inv.seed, "Seed for data synthesis, split, forest and mock provider (42)");
  Opt(app, "--dim", inv.dim, "Embedding dimension (768)");
}

void AddProvider(CLI::App* app, Invocation& inv) {
  Opt(app, "--provider", inv.provider, "Embedding provider: mock, file or http")
      ->check(CLI::IsMember({"mock", "file", "http"}));
  Opt(app, "--store", inv.store, "Embedding store (.cvde) for the file provider");
  Opt(app, "--endpoint", inv.endpoint, "Base URL of the embedding service (http provider)");
  Opt(app, "--timeout-ms", inv.timeout_ms, "HTTP timeout in milliseconds (10000)");
}

void AddSplit(CLI::App* app, Invocation& inv) {
  Opt(app, "--train-fraction", inv.train_fraction, "Training fraction of the split (0.7)");
  app->add_flag("--stratified", inv.stratified, "Split within each label class");
}

void AddForest(CLI::App* app, Invocation& inv) {
  Opt(app, "--trees", inv.trees, "Number of trees (100)");
  Opt(app, "--max-depth", inv.max_depth, "Maximum tree depth (unbounded)");
  Opt(app, "--max-features", inv.max_features, "Features tried per split: sqrt, all or k (all)");
  app->add_flag("--no-bootstrap", inv.no_bootstrap, "Grow each tree on the full training set");
  Opt(app, "--min-samples-split", inv.min_samples_split, "Minimum samples to split a node (2)");
  app->add_option("--threads", inv.threads, "Worker threads for fitting, 0 = all cores");
}

struct Cli {
  std::unique_ptr<CLI::App> app;
  std::unique_ptr<Invocation> inv;
};

Cli Build() {
  Cli cli{std::make_unique<CLI::App>("Cardiovascular risk triage from symptom text", "cvdrisk"),
          std::make_unique<Invocation>()};
  CLI::App& app = *cli.app;
  Invocation& inv = *cli.inv;
  app.require_subcommand(1);
  app.set_help_flag("-h,--help", "Print help and exit");

  auto sub = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->callback([&inv, name] { inv.command = name; });
    AddGlobal(s, inv);
    return s;
  };

  CLI::App* synth = sub("synth", "Write a synthetic two-cluster corpus and its embeddings");
  synth->add_option("--n", inv.n, "Number of records, even (20)");
  synth->add_option("--margin", inv.margin, "Cluster mean separation along dimension 0 (8)");
  Opt(synth, "--out", inv.output, "Output dataset (.jsonl or .csv)")->required();
  Opt(synth, "--embeddings", inv.embeddings, "Output embedding store (.cvde)");

  CLI::App* ingest = sub("ingest", "Validate a dataset, optionally convert and tokenize it");
  Opt(ingest, "--input", inv.input, "Dataset (.jsonl or .csv)")->required();
  Opt(ingest, "--output", inv.output, "Write the validated dataset here (format by extension)");
  Opt(ingest, "--tokens", inv.tokens, "Write WordPiece token sequences here (JSONL)");
  Opt(ingest, "--vocab", inv.vocab, "WordPiece vocabulary, one token per line");
  Opt(ingest, "--max-len", inv.max_len, "Sequence length after truncation and padding (128)");

  CLI::App* embed = sub("embed", "Embed every record into a store");
  Opt(embed, "--input", inv.input, "Dataset (.jsonl or .csv)")->required();
  Opt(embed, "--output", inv.output, "Output embedding store (.cvde)")->required();
  AddProvider(embed, inv);

  CLI::App* train = sub("train", "Split, embed the training rows, fit and save a forest");
  Opt(train, "--data", inv.input, "Labeled dataset (.jsonl or .csv)")->required();
  Opt(train, "--model", inv.model, "Output model file")->required();
  AddProvider(train, inv);
  AddSplit(train, inv);
  AddForest(train, inv);

  CLI::App* predict = sub("predict", "Predict and verify texts or a dataset (JSONL out)");
  Opt(predict, "--model", inv.model, "Trained model file")->required();
  predict->add_option("--text", inv.texts, "Symptom text to classify (repeatable)");
  Opt(predict, "--input", inv.input, "Dataset of texts to classify");
  Opt(predict, "--output", inv.output, "Write JSONL here instead of standard output");
  Opt(predict, "--lexicon", inv.lexicon, "Verifier lexicon JSON (built-in by default)");
  AddProvider(predict, inv);

  CLI::App* evaluate = sub("evaluate", "Score a model on the held-out split");
  Opt(evaluate, "--model", inv.model, "Trained model file")->required();
  Opt(evaluate, "--data", inv.input, "Labeled dataset used for training")->required();
  Opt(evaluate, "--output", inv.output, "Write the JSON report here instead of standard output");
  Opt(evaluate, "--confusion", inv.confusion, "Write the confusion matrix as CSV");
  Opt(evaluate, "--svg", inv.svg, "Write a confusion-matrix heatmap (SVG)");
  evaluate->add_flag("--all", inv.all_records, "Evaluate on every record instead of the test split");
  AddProvider(evaluate, inv);
  AddSplit(evaluate, inv);

  CLI::App* importance = sub("importance", "Top-k MDI feature importances as CSV");
  Opt(importance, "--model", inv.model, "Trained model file")->required();
  importance->add_option("--k", inv.k, "Number of dimensions to list (10)");
  Opt(importance, "--output", inv.output, "Write the CSV here instead of standard output");
  Opt(importance, "--svg", inv.svg, "Write a bar chart (SVG)");

  CLI::App* verify = sub("verify", "Audit labels against their texts with the rule verifier");
  verify->add_option("--text", inv.texts, "Text to audit (repeatable)");
  Opt(verify, "--input", inv.input, "Dataset whose labels are audited");
  Opt(verify, "--label", inv.label, "Predicted label to audit, overriding record labels");
  Opt(verify, "--output", inv.output, "Write JSONL here instead of standard output");
  Opt(verify, "--lexicon", inv.lexicon, "Verifier lexicon JSON (built-in by default)");

  CLI::App* review = sub("review", "Summarize expert ratings: mean Likert and Cohen's kappa");
  review->add_option("--ratings", inv.ratings, "Rater CSV files (rater,case_id,likert,risk_judgment)")
      ->required();
  Opt(review, "--predictions", inv.predictions, "Model predictions JSONL (id, label)");
  Opt(review, "--output", inv.output, "Write the summary JSON here");
  return cli;
}

const std::map<std::string, std::function<int(const Invocation&, std::ostream&)>>& Commands() {
  static const std::map<std::string, std::function<int(const Invocation&, std::ostream&)>> m = {
      {"synth", CmdSynth},           {"ingest", CmdIngest},   {"embed", CmdEmbed},
      {"train", CmdTrain},           {"predict", CmdPredict}, {"evaluate", CmdEvaluate},
      {"importance", CmdImportance}, {"verify", CmdVerify},   {"review", CmdReview}};
  return m;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli = Build();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    cli.app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = cli.app.get();
    for (const CLI::App* s : cli.app->get_subcommands()) target = s;
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cvdrisk: " << e.what() << "\n";
    return 2;
  }
  const std::string& name = cli.inv->command;
  try {
    return Commands().at(name)(*cli.inv, out);
  } catch (const Error& e) {
    err << "cvdrisk " << name << ": " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "cvdrisk " << name << ": " << e.what() << "\n";
  }
  return 1;
}

std::vector<std::string> SubcommandNames() {
  Cli cli = Build();
  std::vector<std::string> names;
  for (const CLI::App* s : cli.app->get_subcommands([](CLI::App*) { return true; })) names.push_back(s->get_name());
  return names;
}

std::string HelpText(std::string_view name) {
  Cli cli = Build();
  if (name.empty()) return cli.app->help();
  return cli.app->get_subcommand(std::string(name))->help();
}

std::vector<std::string> FlagNames(std::string_view name) {
  Cli cli = Build();
  std::vector<std::string> names;
  for (const CLI::Option* o : cli.app->get_subcommand(std::string(name))->get_options()) {
    for (const std::string& l : o->get_lnames()) names.push_back("--" + l);
  }
  return names;
}

}  // namespace cvdrisk::cli
