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

#ifndef CVDRISK_EMBED_H_
#define CVDRISK_EMBED_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cvdrisk {

inline constexpr size_t kDefaultEmbeddingDim = 768;

// Fixed-length sentence embedding ([CLS] position of the encoder output).
struct EmbeddingVector {
  std::vector<float> values;

  size_t dim() const { return values.size(); }
  bool AllFinite() const;
  bool operator==(const EmbeddingVector&) const = default;
};

// Ordered id -> vector map with one dimension for every entry. Rows are kept
// contiguous so the store doubles as the feature matrix.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(size_t dim = kDefaultEmbeddingDim) : dim_(dim) {}

  // Throws Error(kDuplicateId), Error(kDimensionMismatch) or
  // Error(kNonFinite).
  void Add(std::string id, std::span<const float> values);
  void Add(std::string id, const EmbeddingVector& v) { Add(std::move(id), v.values); }

  bool Contains(std::string_view id) const;
  // Throws Error(kMissingId).
  std::span<const float> Row(std::string_view id) const;
  std::span<const float> RowAt(size_t index) const;
  EmbeddingVector Get(std::string_view id) const;

  size_t dim() const { return dim_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> data() const { return data_; }

  bool operator==(const EmbeddingStore& other) const;

 private:
  size_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, size_t> index_;
};

// Binary "CVDE" layout: magic, u16 version = 1, u32 dim, u32 count, index of
// (u16 id length, id bytes), then count * dim little-endian float32.
std::string EncodeStore(const EmbeddingStore& store);
EmbeddingStore DecodeStore(std::string_view bytes);
void WriteStore(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore ReadStore(const std::filesystem::path& path);

// Deterministic bag-of-hashed-tokens stand-in for the clinical encoder.
EmbeddingVector MockEmbed(std::string_view text, size_t dim, uint64_t seed);

enum class ProviderKind { kMock, kFile, kHttp };

std::string_view ProviderKindName(ProviderKind kind);
ProviderKind ParseProviderKind(std::string_view name);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kMock;
  size_t dim = kDefaultEmbeddingDim;
  uint64_t seed = 42;                       // mock only
  std::optional<std::filesystem::path> path;  // file only
  std::optional<std::string> endpoint;        // http only
  std::chrono::milliseconds timeout{10000};   // http only

  // Throws Error(kInvalidArgument) when the kind-specific field is missing
  // or a field for another kind is set.
  void Validate() const;
};

struct EmbeddingRequest {
  std::string_view id;
  std::string_view text;
};

// Source of embeddings for the pipeline. Implementations are safe for
// concurrent calls and every returned vector has exactly dim() finite
// components.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual size_t dim() const = 0;
  virtual EmbeddingVector Embed(std::string_view id,
                                std::string_view text) const = 0;
  // Default implementation embeds one request at a time.
  virtual std::vector<EmbeddingVector> EmbedBatch(
      std::span<const EmbeddingRequest> requests) const;
};

class MockProvider final : public EmbeddingProvider {
 public:
  MockProvider(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {}
  size_t dim() const override { return dim_; }
  EmbeddingVector Embed(std::string_view id, std::string_view text) const override;

 private:
  size_t dim_;
  uint64_t seed_;
};

class FileProvider final : public EmbeddingProvider {
 public:
  // Throws Error(kDimensionMismatch) if the store's dim differs from dim.
  FileProvider(EmbeddingStore store, size_t dim);
  static FileProvider Open(const std::filesystem::path& path, size_t dim);

  size_t dim() const override { return store_.dim(); }
  EmbeddingVector Embed(std::string_view id, std::string_view text) const override;

 private:
  EmbeddingStore store_;
};

// Client for POST {endpoint}/embed with body {"texts": [...]} and reply
// {"dim": d, "vectors": [[...], ...]}. No retries.
class HttpProvider final : public EmbeddingProvider {
 public:
  HttpProvider(std::string endpoint, size_t dim,
               std::chrono::milliseconds timeout);

  size_t dim() const override { return dim_; }
  EmbeddingVector Embed(std::string_view id, std::string_view text) const override;
  std::vector<EmbeddingVector> EmbedBatch(
      std::span<const EmbeddingRequest> requests) const override;

 private:
  std::string base_;    // scheme://host[:port]
  std::string prefix_;  // path before /embed, no trailing slash
  size_t dim_;
  std::chrono::milliseconds timeout_;
};

std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig& cfg);

// One-shot convenience wrapper: builds the configured provider and embeds a
// single text.
EmbeddingVector EmbedText(const ProviderConfig& cfg, std::string_view id,
                          std::string_view text);

// Checks count, dim and finiteness of a provider reply; throws
// Error(kDimensionMismatch / kMalformedResponse / kNonFinite).
void CheckEmbedding(const EmbeddingVector& v, size_t dim, std::string_view id);

}  // namespace cvdrisk

#endif  // CVDRISK_EMBED_H_
