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


// Acceptance runner: one PASS/FAIL line per primary criterion, each with its
// measured runtime against the budget. Exits nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvdrisk/cli.h"
#include "cvdrisk/corpus.h"
#include "cvdrisk/embed.h"
#include "cvdrisk/forest.h"
#include "cvdrisk/metrics.h"
#include "cvdrisk/tokenizer.h"
#include "cvdrisk/verify.h"
#include "oracles.h"
#include "test_util.h"

using namespace cvdrisk;
namespace fs = std::filesystem;

namespace {

// Each check returns whether it held and a short account of what it saw.
struct Outcome {
  bool ok = true;
  std::string detail;

  void Expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void Note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

int RunQuiet(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::RunCli(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

Outcome MetricFormulas() {
  Outcome r;
  const auto p = Precision({7, 1, 0, 0});
  const auto rc = Recall({5, 0, 1, 0});
  r.Expect(p && *p == 0.875, "precision(7,1) = 0.875");
  r.Expect(rc && std::abs(*rc - 0.8333) < 5e-5,  "recall(5,1) = 0.8333");
  r.Expect(p && std::round(*p * 1000) / 10 == 87.5, "87.5%");
  r.Expect(rc && std::round(*rc * 1000) / 10 == 83.3, "83.3%");
  const auto f1 = F1(0.875, 0.8333);
  r.Expect(f1.has_value(), "f1 defined");
  if (f1) {
    r.Expect(*f1 == 2 * 0.875 * 0.8333 / (0.875 + 0.8333), "f1 is the harmonic mean");
    r.Expect(std::abs(*f1 * 100 - 85.3) <= 0.1, "f1 within 0.1 pp of 85.3%");
    r.Note("f1=" + Fmt("%.6f", *f1));
  }
  return r;
}

Outcome SplitOracle() {
  Outcome r;
  std::mt19937_64 rng(2024);
  int cases = 0, mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 2 + rng() % 11, d = 1 + rng() % 3;
    std::vector<std::vector<float>> rows(n, std::vector<float>(d));
    std::vector<RiskLabel> y(n);
    const bool coarse = trial % 2 == 0;
    for (auto& row : rows)
      for (float& v : row)
        v = coarse ? static_cast<float>(rng() % 4)
                   : std::uniform_real_distribution<float>(-5, 5)(rng);
    for (auto& v : y) v = static_cast<int>(rng() % 2);
    std::vector<size_t> samples(n), pool(d);
    std::iota(samples.begin(), samples.end(), 0);
    std::iota(pool.begin(), pool.end(), 0);
    const auto got = BestSplit(samples, FeatureMatrix::FromRows(rows), y, pool);
    const auto want = oracle::BestSplit(rows, y);
    ++cases;
    bool same = got.has_value() == want.has_value();
    if (same && got) {
      same = got->feature == want->feature && got->threshold == want->threshold &&
             std::abs(got->impurity_decrease - want->delta) <= 1e-12;
    }
    mismatches += !same;
  }
  r.Expect(cases >= 200, ">= 200 cases");
  r.Expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
  r.Note(std::to_string(cases) + " cases");
  return r;
}

Outcome ForestDeterminism() {
  Outcome r;
  const SyntheticCorpus c = GenerateSynthetic(20, 8.0, 768, 42);
  FeatureMatrix x(20, 768);
  for (size_t i = 0; i < 20; ++i) x.SetRow(i, c.embeddings.RowAt(i));
  const std::vector<RiskLabel> y = c.dataset.Labels();
  ForestConfig cfg;
  cfg.n_estimators = 100;
  cfg.max_depth.reset();
  cfg.seed = 42;
  testing::TempDir dir;
  SaveModel(Fit(x, y, cfg, 1), dir / "a.cvdf");
  SaveModel(Fit(x, y, cfg), dir / "b.cvdf");
  const std::string a = testing::Slurp(dir / "a.cvdf"), b = testing::Slurp(dir / "b.cvdf");
  r.Expect(!a.empty() && a == b, "model files byte-identical");
  r.Note(std::to_string(a.size()) + " bytes");
  return r;
}

struct EndToEnd {
  double accuracy = 0;
  std::string model;
  bool ok = false;
};

EndToEnd SynthTrainEvaluate(const testing::TempDir& dir, double margin, uint64_t seed) {
  const std::string tag = Fmt("%g", margin) + "-" + std::to_string(seed);
  const std::string data = (dir / ("d" + tag + ".jsonl")).string();
  const std::string store = (dir / ("e" + tag + ".cvde")).string();
  EndToEnd e;
  e.model = (dir / ("m" + tag + ".cvdf")).string();
  const std::string s = std::to_string(seed);
  if (RunQuiet({"synth", "--n", "20", "--margin", Fmt("%g", margin), "--dim", "768", "--seed", s,
                "--out", data, "--embeddings", store}) != 0)
    return e;
  if (RunQuiet({"train", "--data", data, "--store", store, "--model", e.model, "--seed", s}) != 0)
    return e;
  std::string report;
  if (RunQuiet({"evaluate", "--data", data, "--store", store, "--model", e.model, "--seed", s},
               &report) != 0)
    return e;
  e.accuracy = nlohmann::json::parse(report)["accuracy"].get<double>();
  e.ok = true;
  return e;
}

Outcome EndToEndRun() {
  Outcome r;
  testing::TempDir dir;
  const EndToEnd sep = SynthTrainEvaluate(dir, 8.0, 42);
  r.Expect(sep.ok, "margin 8 pipeline ran");
  r.Expect(sep.accuracy == 1.0, "margin 8 accuracy = 1.0");
  r.Note("margin 8 accuracy=" + Fmt("%.3f", sep.accuracy));
  double sum = 0;
  bool all_ran = true;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const EndToEnd e = SynthTrainEvaluate(dir, 2.0, seed);
    all_ran = all_ran && e.ok;
    sum += e.accuracy;
  }
  const double mean = sum / 20;
  r.Expect(all_ran, "margin 2 pipelines ran");
  r.Expect(mean >= 0.8, "margin 2 mean accuracy >= 0.8");
  r.Note("margin 2 mean accuracy over seeds 1..20=" + Fmt("%.4f", mean));
  return r;
}

Outcome Mdi() {
  Outcome r;
  testing::TempDir dir;
  const EndToEnd e = SynthTrainEvaluate(dir, 8.0, 42);
  r.Expect(e.ok, "margin 8 pipeline ran");
  if (!e.ok) return r;
  const std::vector<double> imp = MdiImportances(LoadModel(e.model));
  double total = 0;
  bool nonneg = true;
  for (double v : imp) {
    total += v;
    nonneg = nonneg && v >= 0;
  }
  r.Expect(nonneg, "importances nonnegative");
  r.Expect(std::abs(total - 1.0) <= 1e-9, "importances sum to 1");
  r.Expect(imp.size() == 768 && imp[0] > 0.9, "dimension 0 importance > 0.9");
  std::string csv;
  r.Expect(RunQuiet({"importance", "--model", e.model}, &csv) == 0, "importance command ran");
  size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  r.Expect(lines == 11, "header plus exactly 10 rows");
  r.Note("sum=" + Fmt("%.12f", total) + " d0=" + Fmt("%.4f", imp.empty() ? 0 : imp[0]) +
         " rows=" + std::to_string(lines ? lines - 1 : 0));
  return r;
}

Outcome AurocOracle() {
  Outcome r;
  std::mt19937_64 rng(5);
  int bad = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const size_t n = 2 + rng() % 49;
    std::vector<double> scores(n);
    std::vector<RiskLabel> labels(n);
    for (size_t i = 0; i < n; ++i) {
      // Coarse scores on half the instances force ties.
      scores[i] = inst % 2 ? std::uniform_real_distribution<double>(0, 1)(rng)
                           : static_cast<double>(rng() % 5) / 4;
      labels[i] = static_cast<int>(rng() % 2);
    }
    labels[0] = 1;
    labels[1] = 0;
    bad += std::abs(RocAuc(scores, labels) - oracle::PairAuc(scores, labels)) > 1e-12;
  }
  r.Expect(bad == 0, std::to_string(bad) + " instances differ from pair counting");
  const std::vector<double> s = {0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const std::vector<RiskLabel> l = {0, 0, 0, 1, 1, 1};
  r.Expect(RocAuc(s, l) == 1.0, "separated scores give 1.0");
  r.Note("100 instances");
  return r;
}

Outcome Kappa() {
  Outcome r;
  const auto k = CohenKappa(testing::KappaTableA(), testing::KappaTableB());
  r.Expect(k.has_value() && Fmt("%.6f", *k) == "0.600000", "20-case table gives 0.600000");
  std::mt19937_64 rng(11);
  int self_bad = 0, sym_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const size_t n = 2 + rng() % 40;
    std::vector<RiskLabel> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 2);
      b[i] = static_cast<int>(rng() % 2);
    }
    a[0] = 0;
    a[1] = 1;
    const auto self = CohenKappa(a, a);
    self_bad += !(self && *self == 1.0);
    sym_bad += CohenKappa(a, b) != CohenKappa(b, a);
  }
  r.Expect(self_bad == 0, "kappa(a, a) = 1");
  r.Expect(sym_bad == 0, "symmetry");
  r.Note("kappa=" + Fmt("%.6f", k.value_or(NAN)));
  return r;
}

Outcome TokenizerCorpus() {
  Outcome r;
  const auto cases = nlohmann::json::parse(testing::Slurp(testing::TestData("tokenizer_cases.json")));
  const Vocabulary vocab = Vocabulary::Load(testing::TestData(cases["vocab"].get<std::string>()));
  size_t n = 0;
  for (const auto& c : cases["wordpiece"]) {
    ++n;
    r.Expect(WordPiece(c["word"].get<std::string>(), vocab) ==
                 c["pieces"].get<std::vector<std::string>>(),
             "wordpiece " + c["word"].get<std::string>());
  }
  for (const auto& c : cases["encode"]) {
    ++n;
    const auto seq = Encode(c["text"].get<std::string>(), vocab, c["max_len"].get<size_t>());
    std::vector<int> mask(seq.attention_mask.begin(), seq.attention_mask.end());
    r.Expect(seq.tokens == c["tokens"].get<std::vector<std::string>>() &&
                 mask == c["mask"].get<std::vector<int>>(),
             "encode '" + c["text"].get<std::string>() + "'");
  }
  r.Expect(n >= 10, ">= 10 cases");
  r.Note(std::to_string(n) + " cases");
  return r;
}

Outcome VerifierCorpus() {
  Outcome r;
  const Lexicon& lex = Lexicon::Builtin();
  const auto cases = nlohmann::json::parse(testing::Slurp(testing::TestData("verifier_cases.json")));
  r.Expect(cases.size() == 6, "6 cases");
  for (const auto& c : cases) {
    const std::string text = Normalize(c["text"].get<std::string>());
    auto matches = DetectNegation(text, MatchSymptoms(text, lex), lex);
    const bool ambiguous = DetectTemporalAmbiguity(text, matches, lex);
    if (c.contains("negated")) {
      for (const auto& [name, want] : c["negated"].items()) {
        bool found = false;
        for (const auto& m : matches) {
          if (m.symptom != name) continue;
          found = true;
          r.Expect(m.negated == want.get<bool>(), "negation of '" + text + "'");
        }
        r.Expect(found, "match in '" + text + "'");
      }
    }
    if (c.contains("temporal_ambiguity")) {
      r.Expect(ambiguous == c["temporal_ambiguity"].get<bool>(), "ambiguity of '" + text + "'");
    }
  }
  const std::vector<std::string> words = {
      "no", "denies", "chest", "pain", "shortness", "of", "breath", "fatigue", "but", ",", ".",
      "today", "since", "palpitations", "mild", "without", "never", "racing", "heart", "and"};
  std::mt19937_64 rng(3);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::string text;
    for (size_t i = 0, n = rng() % 12; i < n; ++i) text += words[rng() % words.size()] + " ";
    Prediction p;
    p.label = static_cast<int>(rng() % 2);
    p.score = p.label;
    const auto report = VerifyPrediction(text, p, lex);
    violations += report.hallucination_flag && p.label != 1;
  }
  r.Expect(violations == 0, "flag implies high risk");
  r.Note("6 cases, 1000 fuzzed pairs");
  return r;
}

Outcome Persistence() {
  Outcome r;
  const SyntheticCorpus c = GenerateSynthetic(20, 8.0, 16, 42);
  FeatureMatrix x(20, 16);
  for (size_t i = 0; i < 20; ++i) x.SetRow(i, c.embeddings.RowAt(i));
  ForestConfig cfg;
  cfg.n_estimators = 25;
  const RandomForestModel model = Fit(x, c.dataset.Labels(), cfg);
  const std::string bytes = EncodeModel(model);
  const RandomForestModel back = DecodeModel(bytes);
  r.Expect(back == model, "model decodes equal");
  r.Expect(EncodeModel(back) == bytes, "model re-encodes byte-identical");

  std::mt19937_64 rng(8);
  EmbeddingStore store(24);
  for (int i = 0; i < 100; ++i) {
    std::vector<float> v(24);
    for (float& f : v) {
      uint32_t bits;
      do {
        bits = static_cast<uint32_t>(rng());
      } while (((bits >> 23) & 0xff) == 0xff);  // keep finite values only
      std::memcpy(&f, &bits, sizeof f);
    }
    v[0] = -0.0f;
    v[1] = std::numeric_limits<float>::denorm_min();
    store.Add("v" + std::to_string(i), v);
  }
  testing::TempDir dir;
  WriteStore(store, dir / "s.cvde");
  const EmbeddingStore loaded = ReadStore(dir / "s.cvde");
  r.Expect(loaded.size() == 100 && loaded.ids() == store.ids(), "ids preserved");
  r.Expect(loaded.data().size() == store.data().size() &&
               std::memcmp(loaded.data().data(), store.data().data(),
                           store.data().size() * sizeof(float)) == 0,
           "float bit patterns preserved");
  r.Expect(EncodeStore(loaded) == testing::Slurp(dir / "s.cvde"), "store re-encodes identically");
  r.Note("100-vector store, " + std::to_string(bytes.size()) + "-byte model");
  return r;
}

struct Criterion {
  const char* name;
  double budget_ms;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric formulas", 1, MetricFormulas},
      {"split finder oracle", 5000, SplitOracle},
      {"forest determinism", 10000, ForestDeterminism},
      {"end-to-end synth/train/evaluate", 60000, EndToEndRun},
      {"mdi importances", 10000, Mdi},
      {"auroc oracle", 1000, AurocOracle},
      {"cohen kappa", 1000, Kappa},
      {"tokenizer conformance", 1000, TokenizerCorpus},
      {"verifier mini-corpus", 1000, VerifierCorpus},
      {"persistence", 1000, Persistence},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.Expect(false, std::string("exception: ") + e.what());
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.Expect(ms <= c.budget_ms, "runtime over budget");
    failures += !out.ok;
    std::printf("%s %s (%.3f ms, budget %.0f ms) %s\n", out.ok ? "PASS" : "FAIL", c.name, ms,
                c.budget_ms, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
