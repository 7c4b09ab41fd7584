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

// Model file layout (all integers little-endian):
//
//   "CVDF" u16 version=1
//   config: u32 n_estimators, u8 has_max_depth, u32 max_depth,
//           u8 max_features kind (0 sqrt, 1 all, 2 fixed), u32 k,
//           u8 bootstrap, u64 seed, u32 min_samples_split
//   u32 dim
//   u32 seed count, u64 per-tree seeds
//   n_estimators trees, each in preorder:
//     u8 0 (leaf):     u32 n0, u32 n1
//     u8 1 (internal): u32 feature, f64 threshold, f64 impurity_decrease,
//                      u32 n_node_samples, then left subtree, then right

#include <limits>

#include "binary_io.h"
#include "cvdrisk/error.h"
#include "cvdrisk/forest.h"

namespace cvdrisk {
namespace {

constexpr std::string_view kModelMagic = "CVDF";
constexpr uint16_t kModelVersion = 1;

uint32_t U32Of(size_t v, const char* what) {
  if (v > std::numeric_limits<uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " does not fit in u32");
  }
  return static_cast<uint32_t>(v);
}

void EncodeTree(const DecisionTree& tree, binary::Writer& w) {
  // Stored nodes are already in preorder, but walk explicitly so files stay
  // canonical for trees built by hand.
  std::vector<int32_t> stack = {0};
  while (!stack.empty()) {
    const TreeNode& node = tree.nodes()[static_cast<size_t>(stack.back())];
    stack.pop_back();
    if (node.is_leaf) {
      w.U8(0);
      w.U32(node.n0);
      w.U32(node.n1);
    } else {
      w.U8(1);
      w.U32(node.feature);
      w.F64(node.threshold);
      w.F64(node.impurity_decrease);
      w.U32(node.n_node_samples);
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

DecisionTree DecodeTree(binary::Reader& r, size_t dim) {
  std::vector<TreeNode> nodes;
  // Each entry is (node index, children already attached).
  std::vector<std::pair<size_t, int>> open;
  do {
    TreeNode node;
    const uint8_t tag = r.U8();
    if (tag == 0) {
      node.is_leaf = true;
      node.n0 = r.U32();
      node.n1 = r.U32();
      if (node.n0 + static_cast<uint64_t>(node.n1) == 0) {
        throw Error(ErrorCode::kFormat, "model: empty leaf in tree encoding");
      }
    } else if (tag == 1) {
      node.is_leaf = false;
      node.feature = r.U32();
      node.threshold = r.F64();
      node.impurity_decrease = r.F64();
      node.n_node_samples = r.U32();
      if (node.feature >= dim) {
        throw Error(ErrorCode::kFormat, "model: split feature " + std::to_string(node.feature) +
                                            " outside dim " + std::to_string(dim));
      }
    } else {
      throw Error(ErrorCode::kFormat, "model: bad node tag " + std::to_string(tag));
    }
    const size_t index = nodes.size();
    if (!open.empty()) {
      auto& [parent, attached] = open.back();
      (attached == 0 ? nodes[parent].left : nodes[parent].right) = static_cast<int32_t>(index);
      if (++attached == 2) open.pop_back();
    }
    nodes.push_back(node);
    if (!node.is_leaf) open.emplace_back(index, 0);
  } while (!open.empty());
  return DecisionTree(std::move(nodes));
}

}  // namespace

std::string EncodeModel(const RandomForestModel& model) {
  if (model.trees.empty()) throw Error(ErrorCode::kUntrained, "save: model has no trees");
  const ForestConfig& c = model.config;
  binary::Writer w;
  w.Bytes(kModelMagic);
  w.U16(kModelVersion);
  w.U32(U32Of(c.n_estimators, "n_estimators"));
  w.U8(c.max_depth ? 1 : 0);
  w.U32(c.max_depth ? U32Of(*c.max_depth, "max_depth") : 0);
  w.U8(static_cast<uint8_t>(c.max_features.kind()));
  w.U32(U32Of(c.max_features.k(), "max_features"));
  w.U8(c.bootstrap ? 1 : 0);
  w.U64(c.seed);
  w.U32(U32Of(c.min_samples_split, "min_samples_split"));
  w.U32(U32Of(model.dim, "dim"));
  w.U32(U32Of(model.per_tree_seeds.size(), "seed count"));
  for (uint64_t s : model.per_tree_seeds) w.U64(s);
  if (model.trees.size() != c.n_estimators) {
    throw Error(ErrorCode::kInvalidArgument, "save: tree count differs from n_estimators");
  }
  for (const DecisionTree& tree : model.trees) EncodeTree(tree, w);
  return w.Take();
}

RandomForestModel DecodeModel(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kModelMagic) {
    throw Error(ErrorCode::kBadMagic, "model: bad magic bytes");
  }
  binary::Reader r(bytes, "model (truncated tree encoding)");
  r.Bytes(4);
  const uint16_t version = r.U16();
  if (version != kModelVersion) {
    throw Error(ErrorCode::kBadMagic, "model: unsupported version " + std::to_string(version));
  }
  RandomForestModel model;
  ForestConfig& c = model.config;
  c.n_estimators = r.U32();
  const bool has_depth = r.U8() != 0;
  const uint32_t depth = r.U32();
  if (has_depth) c.max_depth = depth;
  const uint8_t kind = r.U8();
  const uint32_t k = r.U32();
  switch (kind) {
    case 0: c.max_features = MaxFeatures::Sqrt(); break;
    case 1: c.max_features = MaxFeatures::All(); break;
    case 2: c.max_features = MaxFeatures::Fixed(k); break;
    default: throw Error(ErrorCode::kFormat, "model: bad max_features kind");
  }
  c.bootstrap = r.U8() != 0;
  c.seed = r.U64();
  c.min_samples_split = r.U32();
  model.dim = r.U32();
  const uint32_t n_seeds = r.U32();
  if (c.n_estimators < 1 || n_seeds != c.n_estimators) {
    throw Error(ErrorCode::kFormat, "model: seed count " + std::to_string(n_seeds) +
                                        " does not match n_estimators " +
                                        std::to_string(c.n_estimators));
  }
  if (n_seeds > r.remaining() / 8) throw Error(ErrorCode::kFormat, "model: truncated seed list");
  model.per_tree_seeds.resize(n_seeds);
  for (uint64_t& s : model.per_tree_seeds) s = r.U64();
  model.trees.reserve(c.n_estimators);
  for (size_t t = 0; t < c.n_estimators; ++t) model.trees.push_back(DecodeTree(r, model.dim));
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kFormat,
                "model: " + std::to_string(r.remaining()) + " trailing bytes after trees");
  }
  return model;
}

void SaveModel(const RandomForestModel& model, const std::filesystem::path& path) {
  binary::WriteFile(path, EncodeModel(model));
}

RandomForestModel LoadModel(const std::filesystem::path& path) {
  return DecodeModel(binary::ReadFile(path));
}

}  // namespace cvdrisk
