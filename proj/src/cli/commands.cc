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


#include "commands.h"

#include <charconv>
#include <map>
#include <ostream>
#include <sstream>

#include "binary_io.h"
#include "cvdrisk/csv.h"
#include "cvdrisk/error.h"
#include "cvdrisk/metrics.h"
#include "cvdrisk/svg.h"
#include "cvdrisk/verify.h"

namespace cvdrisk::cli {
namespace {

using nlohmann::ordered_json;

std::string Num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

const Path& Require(const std::optional<Path>& p, const char* flag) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(flag) + " is required");
  return *p;
}

void RequireExists(const std::optional<Path>& p) {
  if (p && !std::filesystem::exists(*p)) {
    throw Error(ErrorCode::kIo, "file not found: " + p->string());
  }
}

Dataset LoadData(const Path& path) { return LoadRecords(path, FormatForPath(path)); }

// Resolves the provider's dim against a model (if any) and builds it.
std::unique_ptr<EmbeddingProvider> Provider(PipelineConfig& cfg,
                                            std::optional<size_t> model_dim) {
  ProviderConfig& pc = cfg.provider;
  if (model_dim) {
    if (cfg.provider_dim_set && pc.dim != *model_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "model dim " + std::to_string(*model_dim) + " differs from provider dim " +
                      std::to_string(pc.dim));
    }
    pc.dim = *model_dim;
  }
  pc.Validate();
  if (pc.kind == ProviderKind::kFile) {
    EmbeddingStore store = ReadStore(*pc.path);
    if (!model_dim && !cfg.provider_dim_set) pc.dim = store.dim();
    return std::make_unique<FileProvider>(std::move(store), pc.dim);
  }
  return MakeProvider(pc);
}

EmbeddingVector EmbedRecord(const EmbeddingProvider& provider, const SymptomRecord& r) {
  try {
    EmbeddingVector v = provider.Embed(r.id, r.text);
    CheckEmbedding(v, provider.dim(), r.id);
    return v;
  } catch (const Error& e) {
    throw Error(e.code(), "record '" + r.id + "': " + e.what());
  }
}

FeatureMatrix EmbedAll(const EmbeddingProvider& provider, const Dataset& ds) {
  FeatureMatrix x(ds.size(), provider.dim());
  for (size_t i = 0; i < ds.size(); ++i) x.SetRow(i, EmbedRecord(provider, ds[i]).values);
  return x;
}

// Records from --input (any format) followed by one record per --text.
Dataset Inputs(const Invocation& inv) {
  std::vector<SymptomRecord> records;
  if (inv.input) records = LoadData(*inv.input).records();
  for (size_t i = 0; i < inv.texts.size(); ++i) {
    records.push_back({"text-" + std::to_string(i + 1), inv.texts[i], std::nullopt,
                       RecordSource::kReal});
  }
  return Dataset::FromRecords(std::move(records));
}

const Lexicon& LexiconFor(const PipelineConfig& cfg, std::optional<Lexicon>& holder) {
  if (!cfg.lexicon_path) return Lexicon::Builtin();
  holder = Lexicon::Load(*cfg.lexicon_path);
  return *holder;
}

// Writes to the file when given, otherwise to out.
void Emit(const std::optional<Path>& path, std::string_view content, std::ostream& out) {
  if (path) {
    binary::WriteFile(*path, content);
  } else {
    out << content;
  }
}

std::string JsonLine(const ordered_json& j) { return j.dump() + "\n"; }

}  // namespace

PipelineConfig ResolveConfig(const Invocation& inv) {
  PipelineConfig cfg = inv.config ? LoadConfig(*inv.config) : PipelineConfig{};
  if (inv.seed) {
    cfg.provider.seed = *inv.seed;
    cfg.forest.seed = *inv.seed;
    cfg.split.seed = *inv.seed;
  }
  if (inv.dim) {
    cfg.provider.dim = *inv.dim;
    cfg.provider_dim_set = true;
  }
  ProviderConfig& pc = cfg.provider;
  if (inv.provider) {
    pc.kind = ParseProviderKind(*inv.provider);
  } else if (inv.store) {
    pc.kind = ProviderKind::kFile;
  } else if (inv.endpoint) {
    pc.kind = ProviderKind::kHttp;
  }
  if (inv.store) pc.path = *inv.store;
  if (inv.endpoint) pc.endpoint = *inv.endpoint;
  // Leftovers from the config for another kind would fail validation.
  if (pc.kind != ProviderKind::kFile) pc.path.reset();
  if (pc.kind != ProviderKind::kHttp) pc.endpoint.reset();
  if (inv.timeout_ms) pc.timeout = std::chrono::milliseconds(*inv.timeout_ms);

  ForestConfig& fc = cfg.forest;
  if (inv.trees) fc.n_estimators = *inv.trees;
  if (inv.max_depth) fc.max_depth = *inv.max_depth;
  if (inv.max_features) fc.max_features = MaxFeatures::Parse(*inv.max_features);
  if (inv.no_bootstrap) fc.bootstrap = false;
  if (inv.min_samples_split) fc.min_samples_split = *inv.min_samples_split;
  if (inv.train_fraction) cfg.split.train_fraction = *inv.train_fraction;
  if (inv.stratified) cfg.split.stratified = true;

  if (inv.vocab) cfg.vocab_path = *inv.vocab;
  if (inv.lexicon) cfg.lexicon_path = *inv.lexicon;
  if (inv.max_len) cfg.max_len = *inv.max_len;
  RequireExists(cfg.vocab_path);
  RequireExists(cfg.lexicon_path);
  if (pc.kind == ProviderKind::kFile) RequireExists(pc.path);
  return cfg;
}

int CmdSynth(const Invocation& inv, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(inv);
  const Path& data_out = Require(inv.output, "--out");
  const uint64_t seed = inv.seed.value_or(cfg.provider.seed);
  const SyntheticCorpus corpus = GenerateSynthetic(inv.n, inv.margin, cfg.provider.dim, seed);
  SaveRecords(corpus.dataset, data_out, FormatForPath(data_out));
  if (inv.embeddings) WriteStore(corpus.embeddings, *inv.embeddings);
  out << "records=" << corpus.dataset.size() << " dim=" << cfg.provider.dim << " seed=" << seed
      << "\n";
  return 0;
}

int CmdIngest(const Invocation& inv, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(inv);
  const Dataset ds = LoadData(Require(inv.input, "--input"));
  size_t high = 0, low = 0;
  for (const SymptomRecord& r : ds.records()) {
    if (r.label) (*r.label == 1 ? high : low) += 1;
  }
  if (inv.output) SaveRecords(ds, *inv.output, FormatForPath(*inv.output));
  if (inv.tokens) {
    if (!cfg.vocab_path) {
      throw Error(ErrorCode::kInvalidArgument, "--tokens needs a vocabulary (--vocab)");
    }
    const Vocabulary vocab = Vocabulary::Load(*cfg.vocab_path);
    std::string lines;
    for (const SymptomRecord& r : ds.records()) {
      const TokenSequence seq = Encode(r.text, vocab, cfg.max_len);
      ordered_json j;
      j["id"] = r.id;
      j["tokens"] = seq.tokens;
      j["ids"] = seq.ids;
      j["attention_mask"] = seq.attention_mask;
      lines += JsonLine(j);
    }
    binary::WriteFile(*inv.tokens, lines);
  }
  out << "records=" << ds.size() << " labeled=" << high + low << " high=" << high
      << " low=" << low << "\n";
  return 0;
}

int CmdEmbed(const Invocation& inv, std::ostream& out) {
  PipelineConfig cfg = ResolveConfig(inv);
  const Path& store_out = Require(inv.output, "--output");
  const Dataset ds = LoadData(Require(inv.input, "--input"));
  const auto provider = Provider(cfg, std::nullopt);
  EmbeddingStore store(provider->dim());
  for (const SymptomRecord& r : ds.records()) store.Add(r.id, EmbedRecord(*provider, r));
  WriteStore(store, store_out);
  out << "embedded=" << store.size() << " dim=" << store.dim() << "\n";
  return 0;
}

int CmdTrain(const Invocation& inv, std::ostream& out) {
  PipelineConfig cfg = ResolveConfig(inv);
  const Path& model_out = Require(inv.model, "--model");
  const Dataset ds = LoadData(Require(inv.input, "--data"));
  ds.RequireLabels();
  const DatasetSplit split = Split(ds, cfg.split);
  const auto provider = Provider(cfg, std::nullopt);
  const FeatureMatrix x = EmbedAll(*provider, split.train);
  const RandomForestModel model = Fit(x, split.train.Labels(), cfg.forest, inv.threads);
  SaveModel(model, model_out);
  out << "train=" << split.train.size() << " test=" << split.test.size()
      << " seed=" << cfg.split.seed << "\n";
  return 0;
}

int CmdPredict(const Invocation& inv, std::ostream& out) {
  PipelineConfig cfg = ResolveConfig(inv);
  const RandomForestModel model = LoadModel(Require(inv.model, "--model"));
  std::optional<Lexicon> holder;
  const Lexicon& lex = LexiconFor(cfg, holder);
  const Dataset inputs = Inputs(inv);
  const auto provider = Provider(cfg, model.dim);
  std::string lines;
  for (const SymptomRecord& r : inputs.records()) {
    const Prediction p = Predict(model, EmbedRecord(*provider, r));
    ordered_json j;
    j["id"] = r.id;
    j["label"] = p.label;
    j["score"] = p.score;
    j["votes"] = {p.v0, p.v1};
    j["verification"] = VerificationToJson(VerifyPrediction(r.text, p, lex));
    lines += JsonLine(j);
  }
  Emit(inv.output, lines, out);
  return 0;
}

int CmdEvaluate(const Invocation& inv, std::ostream& out) {
  PipelineConfig cfg = ResolveConfig(inv);
  const RandomForestModel model = LoadModel(Require(inv.model, "--model"));
  const Dataset ds = LoadData(Require(inv.input, "--data"));
  ds.RequireLabels();
  const Dataset test = inv.all_records ? ds : Split(ds, cfg.split).test;
  const auto provider = Provider(cfg, model.dim);
  std::vector<RiskLabel> preds;
  std::vector<double> scores;
  for (const SymptomRecord& r : test.records()) {
    const Prediction p = Predict(model, EmbedRecord(*provider, r));
    preds.push_back(p.label);
    scores.push_back(p.score);
  }
  const EvaluationReport report = Evaluate(preds, scores, test.Labels());
  Emit(inv.output, ReportToJson(report).dump(2) + "\n", out);
  if (inv.confusion) {
    const ConfusionMatrix& cm = report.cm;
    std::string table = csv::FormatRow({"", "predicted_1", "predicted_0"});
    table += csv::FormatRow({"actual_1", std::to_string(cm.tp), std::to_string(cm.fn)});
    table += csv::FormatRow({"actual_0", std::to_string(cm.fp), std::to_string(cm.tn)});
    binary::WriteFile(*inv.confusion, table);
  }
  if (inv.svg) binary::WriteFile(*inv.svg, svg::ConfusionHeatmap(report.cm));
  if (inv.output) out << "accuracy=" << Num(report.accuracy) << " n_test=" << report.n_test << "\n";
  return 0;
}

int CmdImportance(const Invocation& inv, std::ostream& out) {
  ResolveConfig(inv);
  const RandomForestModel model = LoadModel(Require(inv.model, "--model"));
  const auto top = TopKImportances(model, inv.k);
  std::string table = csv::FormatRow({"rank", "dimension", "importance"});
  std::vector<std::pair<std::string, double>> bars;
  for (size_t i = 0; i < top.size(); ++i) {
    table += csv::FormatRow(
        {std::to_string(i + 1), std::to_string(top[i].first), Num(top[i].second)});
    bars.emplace_back("d" + std::to_string(top[i].first), top[i].second);
  }
  Emit(inv.output, table, out);
  if (inv.svg) {
    const std::string title = "Top " + std::to_string(inv.k) + " dimensions by MDI";
    binary::WriteFile(*inv.svg, svg::BarChart(title, bars));
  }
  return 0;
}

int CmdVerify(const Invocation& inv, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(inv);
  std::optional<Lexicon> holder;
  const Lexicon& lex = LexiconFor(cfg, holder);
  const Dataset inputs = Inputs(inv);
  if (inv.label && *inv.label != 0 && *inv.label != 1) {
    throw Error(ErrorCode::kInvalidLabel, "--label must be 0 or 1");
  }
  std::string lines;
  for (const SymptomRecord& r : inputs.records()) {
    const std::optional<RiskLabel> label = inv.label ? inv.label : r.label;
    if (!label) {
      throw Error(ErrorCode::kUnlabeledRecord,
                  "unlabeled record '" + r.id + "' (pass --label to audit it)");
    }
    Prediction p;
    p.label = *label;
    p.score = static_cast<double>(*label);
    ordered_json j;
    j["id"] = r.id;
    j["label"] = *label;
    j["verification"] = VerificationToJson(VerifyPrediction(r.text, p, lex));
    lines += JsonLine(j);
  }
  Emit(inv.output, lines, out);
  return 0;
}

int CmdReview(const Invocation& inv, std::ostream& out) {
  ResolveConfig(inv);
  if (inv.ratings.empty()) throw Error(ErrorCode::kInvalidArgument, "--ratings is required");
  std::vector<RaterSheet> sheets;
  for (const Path& p : inv.ratings) {
    for (RaterSheet& s : LoadRaterSheets(p)) sheets.push_back(std::move(s));
  }
  std::map<std::string, RiskLabel> model_preds;
  if (inv.predictions) {
    std::istringstream lines(binary::ReadFile(*inv.predictions));
    std::string line;
    size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const nlohmann::json j = nlohmann::json::parse(line);
        model_preds[j.at("id").get<std::string>()] = j.at("label").get<int>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, inv.predictions->string() + ":" +
                                           std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  const ReviewSummary summary = SummarizeReview(sheets, model_preds);
  if (inv.output) {
    binary::WriteFile(*inv.output, ReviewToJson(summary).dump(2) + "\n");
  } else {
    out << ReviewToJson(summary).dump(2) << "\n";
  }
  char line[96];
  if (summary.mean_kappa) {
    std::snprintf(line, sizeof(line), "mean Likert %.1f / mean kappa %.2f\n", summary.mean_likert,
                  *summary.mean_kappa);
  } else {
    std::snprintf(line, sizeof(line), "mean Likert %.1f / mean kappa undefined\n",
                  summary.mean_likert);
  }
  out << line;
  return 0;
}

}  // namespace cvdrisk::cli
