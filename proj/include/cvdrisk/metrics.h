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

#ifndef CVDRISK_METRICS_H_
#define CVDRISK_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cvdrisk {

using RiskLabel = int;

// A metric whose denominator vanished is std::nullopt, never 0.
using MaybeMetric = std::optional<double>;

// Positive class = high risk = 1.
struct ConfusionMatrix {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws Error(kLengthMismatch) or Error(kInvalidArgument) for empty input or
// non-binary values.
ConfusionMatrix Confusion(std::span<const RiskLabel> preds, std::span<const RiskLabel> labels);

// Throws Error(kInvalidArgument) on an empty matrix.
double Accuracy(const ConfusionMatrix& cm);
MaybeMetric Precision(const ConfusionMatrix& cm);
MaybeMetric Recall(const ConfusionMatrix& cm);
MaybeMetric F1(double precision, double recall);
MaybeMetric F1(MaybeMetric precision, MaybeMetric recall);

// Area under the ROC curve by trapezoidal sweep over distinct scores. Throws
// Error(kSingleClass) or Error(kLengthMismatch).
double RocAuc(std::span<const double> scores, std::span<const RiskLabel> labels);

struct RocPoint {
  double threshold;  // predict 1 when score >= threshold; +inf for the origin
  double fpr, tpr;
};
std::vector<RocPoint> RocCurve(std::span<const double> scores, std::span<const RiskLabel> labels);

struct EvaluationReport {
  ConfusionMatrix cm;
  double accuracy = 0.0;
  MaybeMetric precision, recall, f1;
  MaybeMetric auroc;
  uint64_t n_test = 0;
};

// AUROC is filled in whenever both classes are present in labels.
EvaluationReport Evaluate(std::span<const RiskLabel> preds, std::span<const double> scores,
                          std::span<const RiskLabel> labels);

// Fixed keys: accuracy, precision, recall, f1, auroc, tp, fp, fn, tn, n_test.
nlohmann::ordered_json ReportToJson(const EvaluationReport& report);
EvaluationReport ReportFromJson(const nlohmann::json& j);

// (p_o - p_e) / (1 - p_e) over paired binary judgments. With p_e == 1 the
// result is 1 if p_o == 1 and undefined otherwise. Throws
// Error(kLengthMismatch) for unequal or empty inputs.
MaybeMetric CohenKappa(std::span<const RiskLabel> a, std::span<const RiskLabel> b);

struct RaterEntry {
  std::string case_id;
  int likert = 0;  // 1..5
  RiskLabel risk_judgment = 0;
};

struct RaterSheet {
  std::string rater;
  std::vector<RaterEntry> entries;
};

// Parses rows of `rater,case_id,likert,risk_judgment`; one file may hold
// several raters. Sheets come back in first-appearance order.
std::vector<RaterSheet> ParseRaterSheets(std::string_view csv_content);
std::vector<RaterSheet> LoadRaterSheets(const std::filesystem::path& path);

struct PairwiseKappa {
  std::string rater_a, rater_b;
  MaybeMetric kappa;
};

struct ReviewSummary {
  double mean_likert = 0.0;
  std::vector<PairwiseKappa> pairwise_kappas;
  MaybeMetric mean_kappa;  // mean over the defined pairwise values
  // Per-rater kappa against the model's labels, when predictions are given.
  std::vector<std::pair<std::string, MaybeMetric>> model_kappas;
  size_t n_cases = 0;
};

// Throws Error(kCaseMismatch) if sheets (or model_preds, when non-empty)
// disagree on the case-id set, Error(kInvalidArgument) for fewer than two
// sheets or out-of-range values.
ReviewSummary SummarizeReview(const std::vector<RaterSheet>& sheets,
                              const std::map<std::string, RiskLabel>& model_preds = {});

nlohmann::ordered_json ReviewToJson(const ReviewSummary& summary);

}  // namespace cvdrisk

#endif  // CVDRISK_METRICS_H_
