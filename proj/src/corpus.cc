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

#include "cvdrisk/corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include <json.hpp>

#include "binary_io.h"
#include "cvdrisk/csv.h"
#include "cvdrisk/error.h"
#include "cvdrisk/prng.h"

namespace cvdrisk {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

std::string At(size_t line) { return "line " + std::to_string(line) + ": "; }

RecordSource ParseSource(std::string_view s, size_t line) {
  if (s.empty() || s == "real") return RecordSource::kReal;
  if (s == "synthetic") return RecordSource::kSynthetic;
  throw Error(ErrorCode::kParse,
              At(line) + "unknown source '" + std::string(s) + "' (real, synthetic)");
}

void CheckRecord(const SymptomRecord& r, const std::string& where) {
  if (r.id.empty()) throw Error(ErrorCode::kInvalidRecord, where + "empty id");
  if (Trim(r.text).empty()) {
    throw Error(ErrorCode::kInvalidRecord, where + "record '" + r.id + "' has empty text");
  }
  if (r.label && *r.label != 0 && *r.label != 1) {
    throw Error(ErrorCode::kInvalidLabel, where + "record '" + r.id + "' has label " +
                                              std::to_string(*r.label) + ", expected 0 or 1");
  }
}

// Shared by both readers: validates, rejects duplicates with the offending
// line, and appends.
class RecordCollector {
 public:
  void Add(SymptomRecord r, size_t line) {
    CheckRecord(r, At(line));
    if (!seen_.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  At(line) + "duplicate id '" + r.id + "'");
    }
    records_.push_back(std::move(r));
  }
  Dataset Finish() { return Dataset::FromRecords(std::move(records_)); }

 private:
  std::vector<SymptomRecord> records_;
  std::unordered_set<std::string> seen_;
};

Dataset ParseJsonl(std::string_view content) {
  RecordCollector out;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const std::string_view line = Trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, At(line_no) + "invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::kParse, At(line_no) + "expected a JSON object");
    SymptomRecord r;
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw Error(ErrorCode::kParse, At(line_no) + "missing string field 'id'");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw Error(ErrorCode::kParse, At(line_no) + "missing string field 'text'");
    }
    r.id = obj["id"].get<std::string>();
    r.text = obj["text"].get<std::string>();
    if (obj.contains("label") && !obj["label"].is_null()) {
      const json& label = obj["label"];
      if (!label.is_number_integer()) {
        throw Error(ErrorCode::kInvalidLabel,
                    At(line_no) + "label must be 0 or 1, got " + label.dump());
      }
      const int64_t v = label.get<int64_t>();
      if (v != 0 && v != 1) {
        throw Error(ErrorCode::kInvalidLabel,
                    At(line_no) + "label must be 0 or 1, got " + label.dump());
      }
      r.label = static_cast<RiskLabel>(v);
    }
    if (obj.contains("source") && !obj["source"].is_null()) {
      if (!obj["source"].is_string()) {
        throw Error(ErrorCode::kParse, At(line_no) + "source must be a string");
      }
      r.source = ParseSource(obj["source"].get<std::string>(), line_no);
    }
    out.Add(std::move(r), line_no);
  }
  return out.Finish();
}

Dataset ParseCsv(std::string_view content) {
  const std::vector<csv::Row> rows = csv::Parse(content);
  if (rows.empty()) return Dataset();
  const std::vector<std::string> expected = {"id", "text", "label", "source"};
  std::vector<std::string> header = rows[0].fields;
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
  if (header != expected) {
    throw Error(ErrorCode::kParse, At(rows[0].line) + "CSV header must be id,text,label,source");
  }
  RecordCollector out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const csv::Row& row = rows[i];
    if (row.fields.size() != expected.size()) {
      throw Error(ErrorCode::kParse, At(row.line) + "expected 4 fields, got " +
                                         std::to_string(row.fields.size()));
    }
    SymptomRecord r;
    r.id = row.fields[0];
    r.text = row.fields[1];
    const std::string_view label = Trim(row.fields[2]);
    if (label == "0" || label == "1") {
      r.label = label == "1" ? 1 : 0;
    } else if (!label.empty()) {
      throw Error(ErrorCode::kInvalidLabel,
                  At(row.line) + "label must be 0 or 1, got '" + std::string(label) + "'");
    }
    r.source = ParseSource(Trim(row.fields[3]), row.line);
    out.Add(std::move(r), row.line);
  }
  return out.Finish();
}

// Fixed phrase bank covering the four symptom families. High-risk texts always
// carry a severity marker, low-risk texts a mildness marker.
constexpr std::array<std::string_view, 5> kSymptoms = {
    "chest pain", "chest tightness", "shortness of breath", "palpitations", "fatigue"};
constexpr std::array<std::string_view, 4> kHighModifiers = {
    "severe", "severe crushing", "severe sudden", "severe worsening"};
constexpr std::array<std::string_view, 4> kLowModifiers = {
    "mild", "mild occasional", "mild intermittent", "mild slight"};
constexpr std::array<std::string_view, 5> kHighContext = {
    "radiating to the left arm", "with sweating", "with nausea", "at rest",
    "with dizziness"};
constexpr std::array<std::string_view, 5> kLowContext = {
    "after heavy exercise", "that resolves with rest", "when tired",
    "after a large meal", "after poor sleep"};
constexpr std::array<std::string_view, 4> kHighAnchors = {
    "since this morning", "for the past hour", "starting today", "for two days"};
constexpr std::array<std::string_view, 4> kLowAnchors = {
    "for several months", "on and off for years", "since last week",
    "for a few weeks"};

template <size_t N>
std::string_view Pick(const std::array<std::string_view, N>& bank, SplitMix64& rng) {
  return bank[rng.Below(N)];
}

}  // namespace

std::string_view RecordSourceName(RecordSource source) {
  return source == RecordSource::kSynthetic ? "synthetic" : "real";
}

Dataset Dataset::FromRecords(std::vector<SymptomRecord> records) {
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < records.size(); ++i) {
    const std::string where = "record " + std::to_string(i + 1) + ": ";
    CheckRecord(records[i], where);
    if (!seen.insert(records[i].id).second) {
      throw Error(ErrorCode::kDuplicateId, where + "duplicate id '" + records[i].id + "'");
    }
  }
  Dataset ds;
  ds.records_ = std::move(records);
  return ds;
}

bool Dataset::AllLabeled() const {
  for (const SymptomRecord& r : records_) {
    if (!r.label) return false;
  }
  return true;
}

void Dataset::RequireLabels() const {
  for (const SymptomRecord& r : records_) {
    if (!r.label) {
      throw Error(ErrorCode::kUnlabeledRecord, "unlabeled record '" + r.id + "'");
    }
  }
}

std::vector<RiskLabel> Dataset::Labels() const {
  RequireLabels();
  std::vector<RiskLabel> labels;
  labels.reserve(records_.size());
  for (const SymptomRecord& r : records_) labels.push_back(*r.label);
  return labels;
}

DataFormat FormatForPath(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DataFormat::kCsv : DataFormat::kJsonl;
}

Dataset ParseRecords(std::string_view content, DataFormat format) {
  return format == DataFormat::kCsv ? ParseCsv(content) : ParseJsonl(content);
}

Dataset LoadRecords(const std::filesystem::path& path, DataFormat format) {
  const std::string content = binary::ReadFile(path);
  try {
    return ParseRecords(content, format);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string SerializeRecords(const Dataset& ds, DataFormat format) {
  std::string out;
  if (format == DataFormat::kCsv) {
    out = csv::FormatRow({"id", "text", "label", "source"});
    for (const SymptomRecord& r : ds.records()) {
      out += csv::FormatRow({r.id, r.text, r.label ? std::to_string(*r.label) : "",
                             std::string(RecordSourceName(r.source))});
    }
    return out;
  }
  for (const SymptomRecord& r : ds.records()) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["text"] = r.text;
    if (r.label) obj["label"] = *r.label;
    obj["source"] = RecordSourceName(r.source);
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

void SaveRecords(const Dataset& ds, const std::filesystem::path& path, DataFormat format) {
  binary::WriteFile(path, SerializeRecords(ds, format));
}

size_t TrainSize(double train_fraction, size_t n) {
  // The slack keeps products like 0.7 * 5 (3.4999...) rounding up as in decimal.
  const double raw = std::floor(train_fraction * static_cast<double>(n) + 0.5 + 1e-9);
  size_t k = raw <= 0.0 ? 0 : static_cast<size_t>(raw);
  if (n >= 2) k = std::clamp<size_t>(k, 1, n - 1);
  return k;
}

DatasetSplit Split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_fraction must lie in (0, 1)");
  }
  ds.RequireLabels();
  const size_t n = ds.size();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "split needs at least 2 records, got " + std::to_string(n));
  }

  SplitMix64 rng(spec.seed);
  std::vector<size_t> train_idx, test_idx;
  if (!spec.stratified) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Shuffle(std::span<size_t>(order), rng);
    const size_t k = TrainSize(spec.train_fraction, n);
    train_idx.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(k));
    test_idx.assign(order.begin() + static_cast<ptrdiff_t>(k), order.end());
  } else {
    for (RiskLabel cls : {0, 1}) {
      std::vector<size_t> members;
      for (size_t i = 0; i < n; ++i) {
        if (*ds[i].label == cls) members.push_back(i);
      }
      Shuffle(std::span<size_t>(members), rng);
      // Per-class rounding without the [1, n-1] clamp; a class of one record
      // goes wherever rounding sends it.
      const double raw = std::floor(spec.train_fraction * members.size() + 0.5 + 1e-9);
      const size_t k = std::min(members.size(), static_cast<size_t>(raw));
      train_idx.insert(train_idx.end(), members.begin(),
                       members.begin() + static_cast<ptrdiff_t>(k));
      test_idx.insert(test_idx.end(), members.begin() + static_cast<ptrdiff_t>(k),
                      members.end());
    }
  }

  auto gather = [&](const std::vector<size_t>& idx) {
    std::vector<SymptomRecord> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(ds[i]);
    return Dataset::FromRecords(std::move(out));
  };
  return DatasetSplit{gather(train_idx), gather(test_idx)};
}

SyntheticCorpus GenerateSynthetic(size_t n, double margin, size_t dim, uint64_t seed) {
  if (n % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic corpus size must be even, got " + std::to_string(n));
  }
  if (dim < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic embedding dim must be >= 2, got " + std::to_string(dim));
  }
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic margin must be finite and >= 0");
  }

  SplitMix64 text_rng(Mix64(seed ^ 0x7465787473ULL));
  SplitMix64 vec_rng(seed);
  std::vector<SymptomRecord> records;
  records.reserve(n);
  EmbeddingStore store(dim);
  std::vector<float> row(dim);
  const int width = n < 1000 ? 3 : static_cast<int>(std::to_string(n - 1).size());
  for (size_t i = 0; i < n; ++i) {
    const RiskLabel label = i % 2 == 0 ? 1 : 0;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%0*zu", width, i);

    std::string text;
    if (label == 1) {
      text.append(Pick(kHighModifiers, text_rng)).append(" ");
      text.append(Pick(kSymptoms, text_rng)).append(" ");
      text.append(Pick(kHighContext, text_rng)).append(" ");
      text.append(Pick(kHighAnchors, text_rng));
    } else {
      text.append(Pick(kLowModifiers, text_rng)).append(" ");
      text.append(Pick(kSymptoms, text_rng)).append(" ");
      text.append(Pick(kLowContext, text_rng)).append(" ");
      text.append(Pick(kLowAnchors, text_rng));
    }
    records.push_back(SymptomRecord{id, std::move(text), label, RecordSource::kSynthetic});

    const double mean0 = (label == 1 ? 0.5 : -0.5) * margin;
    for (size_t j = 0; j < dim; ++j) {
      const double z = vec_rng.Gaussian();
      row[j] = static_cast<float>(j == 0 ? mean0 + z : z);
    }
    store.Add(id, row);
  }
  return SyntheticCorpus{Dataset::FromRecords(std::move(records)), std::move(store)};
}

}  // namespace cvdrisk
