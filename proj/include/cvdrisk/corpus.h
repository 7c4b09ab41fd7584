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

#ifndef CVDRISK_CORPUS_H_
#define CVDRISK_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvdrisk/embed.h"

namespace cvdrisk {

enum class RecordSource { kReal, kSynthetic };

std::string_view RecordSourceName(RecordSource source);

// Binary risk label: 0 = low risk, 1 = high risk.
using RiskLabel = int;

struct SymptomRecord {
  std::string id;
  std::string text;
  std::optional<RiskLabel> label;
  RecordSource source = RecordSource::kReal;

  bool operator==(const SymptomRecord&) const = default;
};

// Ordered collection of records with distinct ids. Construct through
// Dataset::FromRecords to get the record invariants checked.
class Dataset {
 public:
  Dataset() = default;

  // Throws Error(kDuplicateId / kInvalidRecord / kInvalidLabel).
  static Dataset FromRecords(std::vector<SymptomRecord> records);

  const std::vector<SymptomRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const SymptomRecord& operator[](size_t i) const { return records_[i]; }

  bool AllLabeled() const;
  // Throws Error(kUnlabeledRecord) naming the first unlabeled record.
  void RequireLabels() const;
  std::vector<RiskLabel> Labels() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<SymptomRecord> records_;
};

enum class DataFormat { kJsonl, kCsv };

// Picks the format from the file extension (".csv" -> csv, else jsonl).
DataFormat FormatForPath(const std::filesystem::path& path);

Dataset ParseRecords(std::string_view content, DataFormat format);
Dataset LoadRecords(const std::filesystem::path& path, DataFormat format);

std::string SerializeRecords(const Dataset& ds, DataFormat format);
void SaveRecords(const Dataset& ds, const std::filesystem::path& path,
                 DataFormat format);

struct SplitSpec {
  double train_fraction = 0.7;
  uint64_t seed = 42;
  bool stratified = false;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

// Number of training records for n items: round-half-up(fraction * n),
// clamped to [1, n - 1].
size_t TrainSize(double train_fraction, size_t n);

// Deterministic shuffle-and-cut. Throws Error(kUnlabeledRecord) if any record
// lacks a label and Error(kInvalidArgument) for n < 2 or a fraction outside
// (0, 1).
DatasetSplit Split(const Dataset& ds, const SplitSpec& spec);

struct SyntheticCorpus {
  Dataset dataset;
  EmbeddingStore embeddings;
};

// n/2 records per class with phrase-bank texts, plus embeddings drawn from
// two unit-variance isotropic Gaussians whose means sit at -margin/2 (label 0)
// and +margin/2 (label 1) on dimension 0 and at zero elsewhere.
SyntheticCorpus GenerateSynthetic(size_t n, double margin, size_t dim,
                                  uint64_t seed);

}  // namespace cvdrisk

#endif  // CVDRISK_CORPUS_H_
