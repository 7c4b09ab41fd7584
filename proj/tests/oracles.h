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


// Independent reference computations used by the unit and acceptance tests.
// Written from the definitions, sharing no code with the library.

#ifndef CVDRISK_TESTS_ORACLES_H_
#define CVDRISK_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

namespace cvdrisk::oracle {

inline double GiniOf(const std::vector<int>& labels) {
  if (labels.empty()) return 0.0;
  double ones = 0;
  for (int v : labels) ones += v;
  const double p1 = ones / labels.size(), p0 = 1.0 - p1;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  size_t feature;
  double threshold;
  double delta;
};

// Enumerates every (feature, midpoint) pair and evaluates the weighted Gini
// decrease directly. Keeps the first best in (feature, threshold) order;
// decreases within 1e-12 count as equal.
inline std::optional<Split> BestSplit(const std::vector<std::vector<float>>& rows,
                                      const std::vector<int>& y) {
  if (rows.empty()) return std::nullopt;
  const size_t d = rows[0].size();
  const double parent = GiniOf(y);
  const double n = static_cast<double>(rows.size());
  std::optional<Split> best;
  for (size_t f = 0; f < d; ++f) {
    std::set<float> values;
    for (const auto& r : rows) values.insert(r[f]);
    std::vector<float> sorted(values.begin(), values.end());
    for (size_t i = 0; i + 1 < sorted.size(); ++i) {
      const double thr = (double(sorted[i]) + double(sorted[i + 1])) / 2.0;
      std::vector<int> left, right;
      for (size_t s = 0; s < rows.size(); ++s) (double(rows[s][f]) <= thr ? left : right).push_back(y[s]);
      const double delta = parent - (left.size() / n) * GiniOf(left) - (right.size() / n) * GiniOf(right);
      if (delta <= 1e-12) continue;
      if (!best || delta > best->delta + 1e-12) best = Split{f, thr, delta};
    }
  }
  return best;
}

// Mann-Whitney: fraction of positive/negative pairs ranked correctly, ties 1/2.
inline double PairAuc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0, pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Cohen's kappa from the 2x2 table, in floating point.
inline std::optional<double> Kappa(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double agree = 0, a1 = 0, b1 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a1 += a[i];
    b1 += b[i];
  }
  const double po = agree / n;
  const double pe = (a1 / n) * (b1 / n) + (1 - a1 / n) * (1 - b1 / n);
  if (pe == 1.0) return po == 1.0 ? std::optional<double>(1.0) : std::nullopt;
  return (po - pe) / (1 - pe);
}

}  // namespace cvdrisk::oracle

#endif  // CVDRISK_TESTS_ORACLES_H_
