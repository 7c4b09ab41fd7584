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

#include "cvdrisk/forest.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "cvdrisk/error.h"
#include "cvdrisk/prng.h"

namespace cvdrisk {

FeatureMatrix::FeatureMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

FeatureMatrix::FeatureMatrix(size_t rows, size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kLengthMismatch, "feature matrix data has " +
                                                std::to_string(data_.size()) + " values, expected " +
                                                std::to_string(rows * cols));
  }
}

FeatureMatrix FeatureMatrix::FromRows(const std::vector<std::vector<float>>& rows) {
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  FeatureMatrix m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) m.SetRow(r, rows[r]);
  return m;
}

void FeatureMatrix::SetRow(size_t r, std::span<const float> values) {
  if (values.size() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(values.size()) + " values, matrix has " +
                    std::to_string(cols_) + " columns");
  }
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<ptrdiff_t>(r * cols_));
}

MaxFeatures MaxFeatures::Parse(std::string_view text) {
  if (text == "sqrt") return Sqrt();
  if (text == "all") return All();
  size_t k = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size() || k == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_features must be 'sqrt', 'all' or a positive integer, got '" +
                    std::string(text) + "'");
  }
  return Fixed(k);
}

size_t MaxFeatures::Resolve(size_t dim) const {
  switch (kind_) {
    case Kind::kSqrt: {
      size_t r = static_cast<size_t>(std::sqrt(static_cast<double>(dim)));
      while (r * r > dim) --r;
      while ((r + 1) * (r + 1) <= dim) ++r;
      return std::max<size_t>(1, r);
    }
    case Kind::kAll:
      return dim;
    case Kind::kFixed:
      return k_;
  }
  return dim;
}

std::string MaxFeatures::ToString() const {
  switch (kind_) {
    case Kind::kSqrt: return "sqrt";
    case Kind::kAll: return "all";
    case Kind::kFixed: return std::to_string(k_);
  }
  return "all";
}

void ForestConfig::Validate(size_t dim) const {
  if (n_estimators < 1) throw Error(ErrorCode::kInvalidArgument, "n_estimators must be >= 1");
  if (max_features.kind() == MaxFeatures::Kind::kFixed &&
      (max_features.k() < 1 || max_features.k() > dim)) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_features " + std::to_string(max_features.k()) + " outside [1, " +
                    std::to_string(dim) + "]");
  }
  if (min_samples_split < 2) {
    throw Error(ErrorCode::kInvalidArgument, "min_samples_split must be >= 2");
  }
}

RiskLabel DecisionTree::Predict(std::span<const float> x) const {
  size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const TreeNode& node = nodes_[i];
    i = static_cast<double>(x[node.feature]) <= node.threshold ? node.left : node.right;
  }
  return nodes_[i].prediction();
}

size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  size_t best = 0;
  std::vector<std::pair<size_t, size_t>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return best;
}

double Gini(uint64_t n0, uint64_t n1) {
  const uint64_t n = n0 + n1;
  if (n == 0) throw Error(ErrorCode::kEmptyNode, "gini of an empty node");
  const double p0 = static_cast<double>(n0) / static_cast<double>(n);
  const double p1 = static_cast<double>(n1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

double GiniDecrease(uint64_t l0, uint64_t l1, uint64_t r0, uint64_t r1) {
  // G(P) - (nL/n) G(L) - (nR/n) G(R) rewritten over the common denominator
  // n^2 nL nR, so the numerator is an exact integer.
  const __int128 nl = l0 + l1, nr = r0 + r1, n = nl + nr;
  if (nl == 0 || nr == 0) return 0.0;
  const __int128 p0 = l0 + r0, p1 = l1 + r1;
  const __int128 num = n * nr * (__int128(l0) * l0 + __int128(l1) * l1) +
                       n * nl * (__int128(r0) * r0 + __int128(r1) * r1) -
                       nl * nr * (p0 * p0 + p1 * p1);
  if (num <= 0) return 0.0;
  const __int128 den = n * n * nl * nr;
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

std::optional<SplitCandidate> BestSplit(std::span<const size_t> samples,
                                        const FeatureMatrix& x,
                                        std::span<const RiskLabel> y,
                                        std::span<const size_t> feature_pool) {
  uint64_t total0 = 0, total1 = 0;
  for (size_t s : samples) (y[s] == 1 ? total1 : total0)++;
  if (total0 == 0 || total1 == 0) return std::nullopt;

  std::optional<SplitCandidate> best;
  auto better = [&](const SplitCandidate& c) {
    if (!best) return true;
    if (c.impurity_decrease != best->impurity_decrease) {
      return c.impurity_decrease > best->impurity_decrease;
    }
    if (c.feature != best->feature) return c.feature < best->feature;
    return c.threshold < best->threshold;
  };

  std::vector<std::pair<float, RiskLabel>> column(samples.size());
  for (size_t feature : feature_pool) {
    for (size_t i = 0; i < samples.size(); ++i) {
      column[i] = {x(samples[i], feature), y[samples[i]]};
    }
    std::sort(column.begin(), column.end());
    uint64_t l0 = 0, l1 = 0;
    for (size_t i = 0; i + 1 < column.size(); ++i) {
      (column[i].second == 1 ? l1 : l0)++;
      if (!(column[i].first < column[i + 1].first)) continue;
      const double decrease = GiniDecrease(l0, l1, total0 - l0, total1 - l1);
      if (decrease <= 0.0) continue;
      const double threshold =
          (static_cast<double>(column[i].first) + static_cast<double>(column[i + 1].first)) / 2.0;
      const SplitCandidate c{static_cast<uint32_t>(feature), threshold, decrease};
      if (better(c)) best = c;
    }
  }
  return best;
}

std::vector<uint64_t> DeriveTreeSeeds(uint64_t master_seed, size_t n_trees) {
  SplitMix64 master(master_seed);
  std::vector<uint64_t> seeds(n_trees);
  for (uint64_t& s : seeds) s = master.Next();
  return seeds;
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, std::span<const RiskLabel> y,
             const ForestConfig& cfg, uint64_t seed)
      : x_(x), y_(y), cfg_(cfg), rng_(seed), pool_size_(cfg.max_features.Resolve(x.cols())) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), size_t{0});
  }

  DecisionTree Grow() {
    const size_t n = x_.rows();
    std::vector<size_t> samples(n);
    if (cfg_.bootstrap) {
      for (size_t& s : samples) s = static_cast<size_t>(rng_.Below(n));
    } else {
      std::iota(samples.begin(), samples.end(), size_t{0});
    }
    Build(samples, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  // Partial Fisher-Yates over the persistent feature permutation; the pool is
  // returned sorted so tie-breaking by index is independent of draw order.
  std::vector<size_t> DrawPool() {
    const size_t d = features_.size();
    if (pool_size_ >= d) return features_sorted();
    for (size_t i = 0; i < pool_size_; ++i) {
      const size_t j = i + static_cast<size_t>(rng_.Below(d - i));
      std::swap(features_[i], features_[j]);
    }
    std::vector<size_t> pool(features_.begin(),
                             features_.begin() + static_cast<ptrdiff_t>(pool_size_));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  std::vector<size_t> features_sorted() const {
    std::vector<size_t> all(features_.size());
    std::iota(all.begin(), all.end(), size_t{0});
    return all;
  }

  int32_t Build(std::vector<size_t>& samples, size_t depth) {
    uint32_t n0 = 0, n1 = 0;
    for (size_t s : samples) (y_[s] == 1 ? n1 : n0)++;
    const int32_t index = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{.is_leaf = true, .n0 = n0, .n1 = n1});

    const bool pure = n0 == 0 || n1 == 0;
    const bool depth_reached = cfg_.max_depth && depth >= *cfg_.max_depth;
    if (pure || depth_reached || samples.size() < cfg_.min_samples_split) return index;

    const std::vector<size_t> pool = DrawPool();
    const std::optional<SplitCandidate> split = BestSplit(samples, x_, y_, pool);
    if (!split) return index;

    std::vector<size_t> left, right;
    for (size_t s : samples) {
      (static_cast<double>(x_(s, split->feature)) <= split->threshold ? left : right).push_back(s);
    }
    const uint32_t n_node = static_cast<uint32_t>(samples.size());
    samples.clear();
    samples.shrink_to_fit();

    const int32_t l = Build(left, depth + 1);
    const int32_t r = Build(right, depth + 1);
    TreeNode& node = nodes_[static_cast<size_t>(index)];
    node = TreeNode{.is_leaf = false,
                    .feature = split->feature,
                    .threshold = split->threshold,
                    .impurity_decrease = split->impurity_decrease,
                    .n_node_samples = n_node,
                    .left = l,
                    .right = r};
    return index;
  }

  const FeatureMatrix& x_;
  std::span<const RiskLabel> y_;
  const ForestConfig& cfg_;
  SplitMix64 rng_;
  size_t pool_size_;
  std::vector<size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RandomForestModel Fit(const FeatureMatrix& x, std::span<const RiskLabel> y,
                      const ForestConfig& cfg, unsigned threads) {
  const size_t n = x.rows();
  if (y.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "fit: " + std::to_string(n) + " rows but " +
                                                std::to_string(y.size()) + " labels");
  }
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "fit: need at least 2 samples");
  if (x.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "fit: zero-dimensional features");
  cfg.Validate(x.cols());
  bool has0 = false, has1 = false;
  for (RiskLabel label : y) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kInvalidArgument, "fit: labels must be 0 or 1");
    }
    (label == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw Error(ErrorCode::kSingleClass, "fit: training labels are single-class");
  for (size_t r = 0; r < n; ++r) {
    for (float v : x.Row(r)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, "fit: row " + std::to_string(r) + " is not finite");
      }
    }
  }

  RandomForestModel model;
  model.config = cfg;
  model.dim = x.cols();
  model.per_tree_seeds = DeriveTreeSeeds(cfg.seed, cfg.n_estimators);
  model.trees.resize(cfg.n_estimators);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, cfg.n_estimators));
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (size_t k = next++; k < cfg.n_estimators; k = next++) {
      try {
        model.trees[k] = TreeGrower(x, y, cfg, model.per_tree_seeds[k]).Grow();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return model;
}

Prediction Predict(const RandomForestModel& model, std::span<const float> x) {
  if (model.trees.empty()) throw Error(ErrorCode::kUntrained, "predict: model has no trees");
  if (x.size() != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "predict: input has " + std::to_string(x.size()) + " components, model expects " +
                    std::to_string(model.dim));
  }
  Prediction p;
  for (const DecisionTree& tree : model.trees) (tree.Predict(x) == 1 ? p.v1 : p.v0)++;
  p.label = p.v1 >= p.v0 ? 1 : 0;
  p.score = static_cast<double>(p.v1) / static_cast<double>(model.trees.size());
  return p;
}

std::vector<double> MdiImportances(const RandomForestModel& model) {
  if (model.trees.empty()) throw Error(ErrorCode::kUntrained, "importances: model has no trees");
  std::vector<double> mean(model.dim, 0.0);
  std::vector<double> per_tree(model.dim);
  size_t contributing = 0;
  for (const DecisionTree& tree : model.trees) {
    if (tree.is_single_leaf()) continue;
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    const double root = static_cast<double>(tree.nodes().front().samples());
    double total = 0.0;
    for (const TreeNode& node : tree.nodes()) {
      if (node.is_leaf) continue;
      const double c = static_cast<double>(node.n_node_samples) / root * node.impurity_decrease;
      per_tree[node.feature] += c;
      total += c;
    }
    if (total <= 0.0) continue;
    for (size_t j = 0; j < model.dim; ++j) mean[j] += per_tree[j] / total;
    ++contributing;
  }
  if (contributing == 0) return mean;
  for (double& v : mean) v /= static_cast<double>(contributing);
  return mean;
}

std::vector<std::pair<size_t, double>> TopKImportances(const RandomForestModel& model, size_t k) {
  if (k > model.dim) {
    throw Error(ErrorCode::kInvalidArgument, "top-k: k=" + std::to_string(k) +
                                                 " exceeds dim " + std::to_string(model.dim));
  }
  const std::vector<double> imp = MdiImportances(model);
  std::vector<size_t> order(imp.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return imp[a] > imp[b]; });
  std::vector<std::pair<size_t, double>> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) out.emplace_back(order[i], imp[order[i]]);
  return out;
}

}  // namespace cvdrisk
