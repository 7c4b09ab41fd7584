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

#include "cvdrisk/embed.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "binary_io.h"
#include "cvdrisk/error.h"
#include "cvdrisk/prng.h"
#include "cvdrisk/tokenizer.h"

namespace cvdrisk {
namespace {

constexpr std::string_view kStoreMagic = "CVDE";
constexpr uint16_t kStoreVersion = 1;

}  // namespace

bool EmbeddingVector::AllFinite() const {
  for (float v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void EmbeddingStore::Add(std::string id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding for '" + id + "' has " + std::to_string(values.size()) +
                    " components, store dim is " + std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "embedding for '" + id + "' is not finite");
    }
  }
  if (index_.contains(id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate embedding id '" + id + "'");
  }
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

bool EmbeddingStore::Contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::span<const float> EmbeddingStore::Row(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorCode::kMissingId,
                "no embedding for id '" + std::string(id) + "'");
  }
  return RowAt(it->second);
}

std::span<const float> EmbeddingStore::RowAt(size_t index) const {
  return std::span<const float>(data_).subspan(index * dim_, dim_);
}

EmbeddingVector EmbeddingStore::Get(std::string_view id) const {
  auto row = Row(id);
  return EmbeddingVector{{row.begin(), row.end()}};
}

bool EmbeddingStore::operator==(const EmbeddingStore& other) const {
  if (dim_ != other.dim_ || ids_ != other.ids_ || data_.size() != other.data_.size()) {
    return false;
  }
  // Compare bit patterns so -0.0 and 0.0 are distinguished.
  return std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(float)) == 0;
}

std::string EncodeStore(const EmbeddingStore& store) {
  binary::Writer w;
  w.Bytes(kStoreMagic);
  w.U16(kStoreVersion);
  w.U32(static_cast<uint32_t>(store.dim()));
  w.U32(static_cast<uint32_t>(store.size()));
  for (const std::string& id : store.ids()) {
    if (id.size() > std::numeric_limits<uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "embedding id longer than 65535 bytes");
    }
    w.U16(static_cast<uint16_t>(id.size()));
    w.Bytes(id);
  }
  for (float v : store.data()) w.F32(v);
  return w.Take();
}

EmbeddingStore DecodeStore(std::string_view bytes) {
  binary::Reader r(bytes, "embedding store");
  if (bytes.size() < kStoreMagic.size() || bytes.substr(0, 4) != kStoreMagic) {
    throw Error(ErrorCode::kBadMagic, "embedding store: bad magic bytes");
  }
  r.Bytes(4);
  const uint16_t version = r.U16();
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kBadMagic,
                "embedding store: unsupported version " + std::to_string(version));
  }
  const uint32_t dim = r.U32();
  const uint32_t count = r.U32();
  if (count > r.remaining() / sizeof(uint16_t)) {
    throw Error(ErrorCode::kFormat, "embedding store: count mismatch, index of " +
                                        std::to_string(count) + " ids cannot fit");
  }
  std::vector<std::string> ids;
  ids.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t len = r.U16();
    ids.emplace_back(r.Bytes(len));
  }
  const uint64_t payload = static_cast<uint64_t>(count) * dim * sizeof(float);
  if (r.remaining() != payload) {
    throw Error(ErrorCode::kFormat,
                "embedding store: count mismatch, header promises " +
                    std::to_string(count) + " x " + std::to_string(dim) +
                    " floats (" + std::to_string(payload) + " bytes) but payload has " +
                    std::to_string(r.remaining()) + " bytes");
  }
  EmbeddingStore store(dim);
  std::vector<float> row(dim);
  for (uint32_t i = 0; i < count; ++i) {
    for (uint32_t j = 0; j < dim; ++j) row[j] = r.F32();
    store.Add(std::move(ids[i]), row);
  }
  return store;
}

void WriteStore(const EmbeddingStore& store, const std::filesystem::path& path) {
  if (store.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "refusing to write an empty embedding store");
  }
  binary::WriteFile(path, EncodeStore(store));
}

EmbeddingStore ReadStore(const std::filesystem::path& path) {
  return DecodeStore(binary::ReadFile(path));
}

EmbeddingVector MockEmbed(std::string_view text, size_t dim, uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "mock embedding dim must be >= 1");
  std::vector<double> acc(dim, 0.0);
  const std::vector<std::string> tokens = SplitWords(Normalize(text));
  for (const std::string& token : tokens) {
    const uint64_t h = Mix64(Fnv1a64(token) ^ seed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    acc[h % dim] += sign;
  }
  EmbeddingVector v;
  v.values.resize(dim, 0.0f);
  if (tokens.empty()) return v;
  const double scale = 1.0 / std::sqrt(static_cast<double>(tokens.size()));
  for (size_t i = 0; i < dim; ++i) v.values[i] = static_cast<float>(acc[i] * scale);
  return v;
}

std::string_view ProviderKindName(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kMock: return "mock";
    case ProviderKind::kFile: return "file";
    case ProviderKind::kHttp: return "http";
  }
  return "mock";
}

ProviderKind ParseProviderKind(std::string_view name) {
  if (name == "mock") return ProviderKind::kMock;
  if (name == "file") return ProviderKind::kFile;
  if (name == "http") return ProviderKind::kHttp;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown provider kind '" + std::string(name) + "' (mock, file, http)");
}

void ProviderConfig::Validate() const {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "provider dim must be >= 1");
  if ((kind == ProviderKind::kFile) != path.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "provider: path is required for kind=file and only for it");
  }
  if ((kind == ProviderKind::kHttp) != endpoint.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "provider: endpoint is required for kind=http and only for it");
  }
}

void CheckEmbedding(const EmbeddingVector& v, size_t dim, std::string_view id) {
  if (v.dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding for '" + std::string(id) + "' has " +
                    std::to_string(v.dim()) + " components, expected " +
                    std::to_string(dim));
  }
  if (!v.AllFinite()) {
    throw Error(ErrorCode::kNonFinite,
                "embedding for '" + std::string(id) + "' has non-finite components");
  }
}

std::vector<EmbeddingVector> EmbeddingProvider::EmbedBatch(
    std::span<const EmbeddingRequest> requests) const {
  std::vector<EmbeddingVector> out;
  out.reserve(requests.size());
  for (const EmbeddingRequest& r : requests) out.push_back(Embed(r.id, r.text));
  return out;
}

EmbeddingVector MockProvider::Embed(std::string_view /*id*/,
                                    std::string_view text) const {
  return MockEmbed(text, dim_, seed_);
}

FileProvider::FileProvider(EmbeddingStore store, size_t dim) : store_(std::move(store)) {
  if (store_.dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding store has dim " + std::to_string(store_.dim()) +
                    ", pipeline expects " + std::to_string(dim));
  }
}

FileProvider FileProvider::Open(const std::filesystem::path& path, size_t dim) {
  return FileProvider(ReadStore(path), dim);
}

EmbeddingVector FileProvider::Embed(std::string_view id,
                                    std::string_view /*text*/) const {
  return store_.Get(id);
}

std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig& cfg) {
  cfg.Validate();
  switch (cfg.kind) {
    case ProviderKind::kMock:
      return std::make_unique<MockProvider>(cfg.dim, cfg.seed);
    case ProviderKind::kFile:
      return std::make_unique<FileProvider>(FileProvider::Open(*cfg.path, cfg.dim));
    case ProviderKind::kHttp:
      return std::make_unique<HttpProvider>(*cfg.endpoint, cfg.dim, cfg.timeout);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown provider kind");
}

EmbeddingVector EmbedText(const ProviderConfig& cfg, std::string_view id,
                          std::string_view text) {
  auto provider = MakeProvider(cfg);
  EmbeddingVector v = provider->Embed(id, text);
  CheckEmbedding(v, cfg.dim, id);
  return v;
}

}  // namespace cvdrisk
