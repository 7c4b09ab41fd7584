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

#include "cvdrisk/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "binary_io.h"
#include "cvdrisk/csv.h"
#include "cvdrisk/error.h"

namespace cvdrisk {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void CheckBinary(std::span<const RiskLabel> v, const char* what) {
  for (RiskLabel x : v) {
    if (x != 0 && x != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " must be 0/1, found " + std::to_string(x));
    }
  }
}

ordered_json MetricJson(const MaybeMetric& m) { return m ? ordered_json(*m) : ordered_json(nullptr); }

MaybeMetric MetricFrom(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

int ParseInt(std::string_view s, size_t line, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what +
                                       " is not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

ConfusionMatrix Confusion(std::span<const RiskLabel> preds, std::span<const RiskLabel> labels) {
  if (preds.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "confusion: " + std::to_string(preds.size()) +
                                                " predictions vs " + std::to_string(labels.size()) +
                                                " labels");
  }
  if (preds.empty()) throw Error(ErrorCode::kInvalidArgument, "confusion: no cases");
  CheckBinary(preds, "predictions");
  CheckBinary(labels, "labels");
  ConfusionMatrix cm;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == 1) {
      (labels[i] == 1 ? cm.tp : cm.fp)++;
    } else {
      (labels[i] == 1 ? cm.fn : cm.tn)++;
    }
  }
  return cm;
}

double Accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::kInvalidArgument, "accuracy of an empty matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

MaybeMetric Precision(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fp == 0) return std::nullopt;
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
}

MaybeMetric Recall(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) return std::nullopt;
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

MaybeMetric F1(double precision, double recall) {
  if (precision + recall == 0.0) return std::nullopt;
  return 2.0 * precision * recall / (precision + recall);
}

MaybeMetric F1(MaybeMetric precision, MaybeMetric recall) {
  if (!precision || !recall) return std::nullopt;
  return F1(*precision, *recall);
}

namespace {

struct RankedScores {
  std::vector<size_t> order;  // indices by descending score
  uint64_t positives = 0, negatives = 0;
};

RankedScores Rank(std::span<const double> scores, std::span<const RiskLabel> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "roc: scores and labels differ in length");
  }
  CheckBinary(labels, "labels");
  RankedScores r;
  for (RiskLabel l : labels) (l == 1 ? r.positives : r.negatives)++;
  if (r.positives == 0 || r.negatives == 0) {
    throw Error(ErrorCode::kSingleClass, "roc: labels contain a single class");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::kNonFinite, "roc: NaN score");
  }
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return r;
}

}  // namespace

std::vector<RocPoint> RocCurve(std::span<const double> scores, std::span<const RiskLabel> labels) {
  const RankedScores r = Rank(scores, labels);
  std::vector<RocPoint> curve = {{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  uint64_t tp = 0, fp = 0;
  for (size_t i = 0; i < r.order.size();) {
    const double s = scores[r.order[i]];
    while (i < r.order.size() && scores[r.order[i]] == s) {
      (labels[r.order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    curve.push_back({s, static_cast<double>(fp) / static_cast<double>(r.negatives),
                     static_cast<double>(tp) / static_cast<double>(r.positives)});
  }
  // Closing point at -inf coincides with (1, 1) reached by the last group.
  curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return curve;
}

double RocAuc(std::span<const double> scores, std::span<const RiskLabel> labels) {
  const RankedScores r = Rank(scores, labels);
  // Twice the trapezoidal area in units of (1/P) x (1/N) cells, kept integral.
  uint64_t tp = 0;
  uint64_t area2 = 0;
  for (size_t i = 0; i < r.order.size();) {
    const double s = scores[r.order[i]];
    uint64_t dtp = 0, dfp = 0;
    while (i < r.order.size() && scores[r.order[i]] == s) {
      (labels[r.order[i]] == 1 ? dtp : dfp)++;
      ++i;
    }
    area2 += dfp * (2 * tp + dtp);
    tp += dtp;
  }
  return static_cast<double>(area2) / (2.0 * static_cast<double>(r.positives) *
                                       static_cast<double>(r.negatives));
}

EvaluationReport Evaluate(std::span<const RiskLabel> preds, std::span<const double> scores,
                          std::span<const RiskLabel> labels) {
  EvaluationReport report;
  report.cm = Confusion(preds, labels);
  report.n_test = report.cm.total();
  report.accuracy = Accuracy(report.cm);
  report.precision = Precision(report.cm);
  report.recall = Recall(report.cm);
  report.f1 = F1(report.precision, report.recall);
  const bool both = std::find(labels.begin(), labels.end(), 0) != labels.end() &&
                    std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (both && !scores.empty()) report.auroc = RocAuc(scores, labels);
  return report;
}

ordered_json ReportToJson(const EvaluationReport& r) {
  ordered_json j;
  j["accuracy"] = r.accuracy;
  j["precision"] = MetricJson(r.precision);
  j["recall"] = MetricJson(r.recall);
  j["f1"] = MetricJson(r.f1);
  j["auroc"] = MetricJson(r.auroc);
  j["tp"] = r.cm.tp;
  j["fp"] = r.cm.fp;
  j["fn"] = r.cm.fn;
  j["tn"] = r.cm.tn;
  j["n_test"] = r.n_test;
  return j;
}

EvaluationReport ReportFromJson(const json& j) {
  EvaluationReport r;
  try {
    r.cm = {j.at("tp").get<uint64_t>(), j.at("fp").get<uint64_t>(), j.at("fn").get<uint64_t>(),
            j.at("tn").get<uint64_t>()};
    r.accuracy = j.at("accuracy").get<double>();
    r.n_test = j.at("n_test").get<uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("evaluation report: ") + e.what());
  }
  r.precision = MetricFrom(j, "precision");
  r.recall = MetricFrom(j, "recall");
  r.f1 = MetricFrom(j, "f1");
  r.auroc = MetricFrom(j, "auroc");
  return r;
}

MaybeMetric CohenKappa(std::span<const RiskLabel> a, std::span<const RiskLabel> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "kappa: judgment vectors must be non-empty and paired");
  }
  CheckBinary(a, "judgments");
  CheckBinary(b, "judgments");
  // Integer form: kappa = (n * agree - sum_c a_c b_c) / (n^2 - sum_c a_c b_c).
  int64_t n = static_cast<int64_t>(a.size());
  int64_t agree = 0, a1 = 0, b1 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a1 += a[i];
    b1 += b[i];
  }
  const int64_t chance = a1 * b1 + (n - a1) * (n - b1);
  const int64_t den = n * n - chance;
  if (den == 0) {
    if (agree == n) return 1.0;
    return std::nullopt;
  }
  return static_cast<double>(n * agree - chance) / static_cast<double>(den);
}

std::vector<RaterSheet> ParseRaterSheets(std::string_view content) {
  const std::vector<csv::Row> rows = csv::Parse(content);
  if (rows.empty()) return {};
  std::vector<std::string> header = rows[0].fields;
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
  if (header != std::vector<std::string>{"rater", "case_id", "likert", "risk_judgment"}) {
    throw Error(ErrorCode::kParse, "rater sheet header must be rater,case_id,likert,risk_judgment");
  }
  std::vector<RaterSheet> sheets;
  std::unordered_map<std::string, size_t> by_rater;
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t i = 1; i < rows.size(); ++i) {
    const csv::Row& row = rows[i];
    const std::string where = "line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != 4) throw Error(ErrorCode::kParse, where + "expected 4 fields");
    RaterEntry e;
    e.case_id = row.fields[1];
    e.likert = ParseInt(row.fields[2], row.line, "likert");
    e.risk_judgment = ParseInt(row.fields[3], row.line, "risk_judgment");
    if (e.likert < 1 || e.likert > 5) {
      throw Error(ErrorCode::kInvalidArgument, where + "likert must be in 1..5");
    }
    if (e.risk_judgment != 0 && e.risk_judgment != 1) {
      throw Error(ErrorCode::kInvalidArgument, where + "risk_judgment must be 0 or 1");
    }
    const std::string& rater = row.fields[0];
    if (!seen.emplace(rater, e.case_id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  where + "rater '" + rater + "' rated case '" + e.case_id + "' twice");
    }
    auto [it, inserted] = by_rater.emplace(rater, sheets.size());
    if (inserted) sheets.push_back(RaterSheet{rater, {}});
    sheets[it->second].entries.push_back(std::move(e));
  }
  return sheets;
}

std::vector<RaterSheet> LoadRaterSheets(const std::filesystem::path& path) {
  try {
    return ParseRaterSheets(binary::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ReviewSummary SummarizeReview(const std::vector<RaterSheet>& sheets,
                              const std::map<std::string, RiskLabel>& model_preds) {
  if (sheets.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "review needs at least 2 rater sheets");
  }
  // Case order follows the first sheet; every other sheet must match its set.
  std::vector<std::string> cases;
  for (const RaterEntry& e : sheets[0].entries) cases.push_back(e.case_id);
  const std::set<std::string> case_set(cases.begin(), cases.end());
  if (case_set.size() != cases.size()) {
    throw Error(ErrorCode::kCaseMismatch, "rater '" + sheets[0].rater + "' repeats a case id");
  }

  std::vector<std::vector<RiskLabel>> judgments(sheets.size());
  double likert_sum = 0.0;
  size_t likert_n = 0;
  for (size_t s = 0; s < sheets.size(); ++s) {
    std::unordered_map<std::string, const RaterEntry*> by_case;
    for (const RaterEntry& e : sheets[s].entries) {
      if (!by_case.emplace(e.case_id, &e).second) {
        throw Error(ErrorCode::kCaseMismatch,
                    "rater '" + sheets[s].rater + "' repeats case '" + e.case_id + "'");
      }
      if (e.likert < 1 || e.likert > 5) {
        throw Error(ErrorCode::kInvalidArgument, "likert outside 1..5");
      }
      likert_sum += e.likert;
      ++likert_n;
    }
    for (const std::string& c : cases) {
      auto it = by_case.find(c);
      if (it == by_case.end()) {
        throw Error(ErrorCode::kCaseMismatch,
                    "rater '" + sheets[s].rater + "' is missing case '" + c + "'");
      }
      judgments[s].push_back(it->second->risk_judgment);
    }
    if (by_case.size() != cases.size()) {
      for (const auto& [c, _] : by_case) {
        if (!case_set.contains(c)) {
          throw Error(ErrorCode::kCaseMismatch,
                      "rater '" + sheets[s].rater + "' has extra case '" + c + "'");
        }
      }
    }
  }

  ReviewSummary out;
  out.n_cases = cases.size();
  out.mean_likert = likert_n ? likert_sum / static_cast<double>(likert_n) : 0.0;
  double kappa_sum = 0.0;
  size_t kappa_n = 0;
  for (size_t i = 0; i < sheets.size(); ++i) {
    for (size_t j = i + 1; j < sheets.size(); ++j) {
      MaybeMetric k = CohenKappa(judgments[i], judgments[j]);
      if (k) {
        kappa_sum += *k;
        ++kappa_n;
      }
      out.pairwise_kappas.push_back({sheets[i].rater, sheets[j].rater, k});
    }
  }
  if (kappa_n) out.mean_kappa = kappa_sum / static_cast<double>(kappa_n);

  if (!model_preds.empty()) {
    std::vector<RiskLabel> model;
    for (const std::string& c : cases) {
      auto it = model_preds.find(c);
      if (it == model_preds.end()) {
        throw Error(ErrorCode::kCaseMismatch, "predictions are missing case '" + c + "'");
      }
      model.push_back(it->second);
    }
    for (size_t s = 0; s < sheets.size(); ++s) {
      out.model_kappas.emplace_back(sheets[s].rater, CohenKappa(judgments[s], model));
    }
  }
  return out;
}

ordered_json ReviewToJson(const ReviewSummary& s) {
  ordered_json j;
  j["n_cases"] = s.n_cases;
  j["mean_likert"] = s.mean_likert;
  j["pairwise_kappas"] = ordered_json::array();
  for (const PairwiseKappa& p : s.pairwise_kappas) {
    j["pairwise_kappas"].push_back(
        {{"rater_a", p.rater_a}, {"rater_b", p.rater_b}, {"kappa", MetricJson(p.kappa)}});
  }
  j["mean_kappa"] = MetricJson(s.mean_kappa);
  if (!s.model_kappas.empty()) {
    j["model_kappas"] = ordered_json::array();
    for (const auto& [rater, k] : s.model_kappas) {
      j["model_kappas"].push_back({{"rater", rater}, {"kappa", MetricJson(k)}});
    }
  }
  return j;
}

}  // namespace cvdrisk
