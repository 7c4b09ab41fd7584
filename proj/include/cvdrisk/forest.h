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

// Random Forest over dense embedding rows.
//
// Trees are grown with Gini splits at midpoints between consecutive distinct
// feature values. Each tree draws its own seed from a splitmix64 stream
// seeded by ForestConfig::seed before any tree is grown, so fitting is a pure
// function of (X, y, config) no matter how trees are scheduled across threads.
// The ensemble predicts by majority vote with ties going to the high-risk
// class, and exposes the positive-vote fraction as a score.

#ifndef CVDRISK_FOREST_H_
#define CVDRISK_FOREST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvdrisk/embed.h"

namespace cvdrisk {

// Row-major n x d float matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(size_t rows, size_t cols);
  FeatureMatrix(size_t rows, size_t cols, std::vector<float> data);
  static FeatureMatrix FromRows(const std::vector<std::vector<float>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  float operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  float& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  std::span<const float> Row(size_t r) const {
    return std::span<const float>(data_).subspan(r * cols_, cols_);
  }
  void SetRow(size_t r, std::span<const float> values);

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<float> data_;
};

class MaxFeatures {
 public:
  enum class Kind : uint8_t { kSqrt = 0, kAll = 1, kFixed = 2 };

  static MaxFeatures Sqrt() { return MaxFeatures(Kind::kSqrt, 0); }
  static MaxFeatures All() { return MaxFeatures(Kind::kAll, 0); }
  static MaxFeatures Fixed(size_t k) { return MaxFeatures(Kind::kFixed, k); }
  // Accepts "sqrt", "all" or a positive integer.
  static MaxFeatures Parse(std::string_view text);

  Kind kind() const { return kind_; }
  size_t k() const { return k_; }
  // Feature-pool size for a given dimension: floor(sqrt(d)) (min 1), d, or k.
  size_t Resolve(size_t dim) const;
  std::string ToString() const;

  bool operator==(const MaxFeatures&) const = default;

 private:
  MaxFeatures(Kind kind, size_t k) : kind_(kind), k_(k) {}
  Kind kind_;
  size_t k_;
};

struct ForestConfig {
  size_t n_estimators = 100;
  std::optional<size_t> max_depth;  // unbounded when empty
  MaxFeatures max_features = MaxFeatures::All();
  bool bootstrap = true;
  uint64_t seed = 42;
  size_t min_samples_split = 2;

  // Throws Error(kInvalidArgument).
  void Validate(size_t dim) const;
  bool operator==(const ForestConfig&) const = default;
};

using RiskLabel = int;

// Flat node record. Leaves carry class counts; internal nodes carry the split.
// Samples with x[feature] <= threshold go left.
struct TreeNode {
  bool is_leaf = true;
  uint32_t n0 = 0, n1 = 0;    // leaf class counts
  uint32_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
  uint32_t n_node_samples = 0;  // includes bootstrap duplicates
  int32_t left = -1, right = -1;

  // Majority class of a leaf; ties predict 1.
  RiskLabel prediction() const { return n1 >= n0 ? 1 : 0; }
  uint32_t samples() const { return is_leaf ? n0 + n1 : n_node_samples; }

  bool operator==(const TreeNode&) const = default;
};

// Nodes are stored in preorder; index 0 is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  RiskLabel Predict(std::span<const float> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  size_t depth() const;
  bool is_single_leaf() const { return nodes_.size() <= 1; }

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct RandomForestModel {
  ForestConfig config;
  size_t dim = 0;
  std::vector<uint64_t> per_tree_seeds;
  std::vector<DecisionTree> trees;

  bool operator==(const RandomForestModel&) const = default;
};

struct Prediction {
  RiskLabel label = 0;
  double score = 0.0;  // v1 / n_estimators
  uint32_t v0 = 0, v1 = 0;

  bool operator==(const Prediction&) const = default;
};

struct SplitCandidate {
  uint32_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;

  bool operator==(const SplitCandidate&) const = default;
};

// 1 - p0^2 - p1^2. Throws Error(kEmptyNode) when n0 + n1 == 0.
double Gini(uint64_t n0, uint64_t n1);

// Weighted impurity decrease of a binary partition, computed from counts.
// Equal partitions of equal-size parents give bit-identical results.
double GiniDecrease(uint64_t left0, uint64_t left1, uint64_t right0, uint64_t right1);

// Best (feature, midpoint) over the pool by weighted Gini decrease. Ties go
// to the lower feature index, then the lower threshold. Returns nullopt if no
// candidate decreases impurity.
std::optional<SplitCandidate> BestSplit(std::span<const size_t> samples,
                                        const FeatureMatrix& x,
                                        std::span<const RiskLabel> y,
                                        std::span<const size_t> feature_pool);

// Per-tree seeds for a master seed: successive outputs of splitmix64.
std::vector<uint64_t> DeriveTreeSeeds(uint64_t master_seed, size_t n_trees);

// Throws Error(kLengthMismatch / kSingleClass / kNonFinite /
// kInvalidArgument). threads == 0 uses the hardware concurrency.
RandomForestModel Fit(const FeatureMatrix& x, std::span<const RiskLabel> y,
                      const ForestConfig& cfg, unsigned threads = 0);

// Throws Error(kDimensionMismatch) or Error(kUntrained).
Prediction Predict(const RandomForestModel& model, std::span<const float> x);
inline Prediction Predict(const RandomForestModel& model, const EmbeddingVector& x) {
  return Predict(model, std::span<const float>(x.values));
}

// Mean decrease in impurity. Each internal node adds
// (n_node_samples / n_root_samples) * decrease to its feature; per-tree
// vectors are normalized to sum 1 and averaged over the trees that split.
// All-leaf forests give the zero vector.
std::vector<double> MdiImportances(const RandomForestModel& model);

// Top-k dimensions by importance, ties to the lower index. Throws
// Error(kInvalidArgument) when k > dim.
std::vector<std::pair<size_t, double>> TopKImportances(const RandomForestModel& model,
                                                       size_t k = 10);

// "CVDF" binary layout, see forest_io.cc.
std::string EncodeModel(const RandomForestModel& model);
RandomForestModel DecodeModel(std::string_view bytes);
void SaveModel(const RandomForestModel& model, const std::filesystem::path& path);
RandomForestModel LoadModel(const std::filesystem::path& path);

}  // namespace cvdrisk

#endif  // CVDRISK_FOREST_H_
