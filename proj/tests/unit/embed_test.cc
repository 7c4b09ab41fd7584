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


#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "cvdrisk/embed.h"
#include "cvdrisk/error.h"
#include "cvdrisk/prng.h"
#include "cvdrisk/tokenizer.h"
#include "test_util.h"

using namespace cvdrisk;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

EmbeddingStore RandomStore(size_t count, size_t dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  EmbeddingStore s(dim);
  std::vector<float> row(dim);
  for (size_t i = 0; i < count; ++i) {
    for (float& v : row) v = g(rng);
    s.Add("id-" + std::to_string(i), row);
  }
  return s;
}

// Independent evaluation of the mock rule straight from its definition.
std::vector<float> MockOracle(std::string_view text, size_t dim, uint64_t seed) {
  std::vector<double> acc(dim, 0.0);
  const auto tokens = SplitWords(Normalize(text));
  for (const auto& t : tokens) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : t) h = (h ^ c) * 0x100000001b3ULL;
    uint64_t z = h ^ seed;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    acc[z % dim] += (z >> 63) ? -1.0 : 1.0;
  }
  std::vector<float> out(dim, 0.0f);
  if (tokens.empty()) return out;
  for (size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / std::sqrt(double(tokens.size())));
  return out;
}

}  // namespace

TEST_CASE("store rejects bad rows") {
  EmbeddingStore s(3);
  s.Add("a", std::vector<float>{1, 2, 3});
  CHECK(CodeOf([&] { s.Add("a", std::vector<float>{1, 2, 3}); }) == ErrorCode::kDuplicateId);
  CHECK(CodeOf([&] { s.Add("b", std::vector<float>{1, 2}); }) == ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([&] { s.Add("c", std::vector<float>{1, NAN, 3}); }) == ErrorCode::kNonFinite);
  CHECK(CodeOf([&] { s.Row("zz"); }) == ErrorCode::kMissingId);
  CHECK(s.size() == 1);
}

TEST_CASE("store round-trip of 3 vectors") {
  const EmbeddingStore s = RandomStore(3, 5, 1);
  CHECK(DecodeStore(EncodeStore(s)) == s);
}

TEST_CASE("store file: 20 ids at dim 768 has a 20*768*4 byte payload after the index") {
  const EmbeddingStore s = RandomStore(20, 768, 2);
  const std::string bytes = EncodeStore(s);
  size_t index = 0;
  for (const auto& id : s.ids()) index += 2 + id.size();
  const size_t header = 4 + 2 + 4 + 4;
  CHECK(bytes.size() - header - index == 20u * 768u * 4u);
  CHECK(bytes.substr(0, 4) == "CVDE");
}

TEST_CASE("store round-trip preserves float bit patterns") {
  EmbeddingStore s(4);
  const float specials[] = {0.0f, -0.0f, std::numeric_limits<float>::denorm_min(),
                            std::numeric_limits<float>::max(), -1.17549435e-38f, 0.1f};
  s.Add("specials", std::vector<float>(specials, specials + 4));
  s.Add("more", std::vector<float>{specials[4], specials[5], 1e-30f, -7.5f});
  testing::TempDir dir;
  WriteStore(s, dir / "s.cvde");
  const EmbeddingStore back = ReadStore(dir / "s.cvde");
  REQUIRE(back.ids() == s.ids());
  for (size_t i = 0; i < s.data().size(); ++i) {
    CHECK(std::bit_cast<uint32_t>(back.data()[i]) == std::bit_cast<uint32_t>(s.data()[i]));
  }
}

TEST_CASE("store decode errors") {
  const std::string bytes = EncodeStore(RandomStore(3, 4, 3));
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(CodeOf([&] { DecodeStore(bad); }) == ErrorCode::kBadMagic);
  std::string version = bytes;
  version[4] = 9;
  CHECK(CodeOf([&] { DecodeStore(version); }) == ErrorCode::kBadMagic);
  try {
    DecodeStore(bytes.substr(0, bytes.size() - 6));
    FAIL("expected count mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(std::string(e.what()).find("count mismatch") != std::string::npos);
  }
  CHECK(CodeOf([&] { DecodeStore(bytes + "extra"); }) == ErrorCode::kFormat);
  CHECK(CodeOf([&] { DecodeStore(bytes.substr(0, 9)); }) == ErrorCode::kFormat);
  // Duplicate ids in the index.
  EmbeddingStore one(1);
  one.Add("aa", std::vector<float>{1});
  one.Add("ab", std::vector<float>{2});
  std::string dup = EncodeStore(one);
  dup[dup.find("ab") + 1] = 'a';
  CHECK(CodeOf([&] { DecodeStore(dup); }) == ErrorCode::kDuplicateId);
  CHECK(CodeOf([] { WriteStore(EmbeddingStore(3), "/nonexistent/x.cvde"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("mock embed: empty text is the zero vector") {
  const EmbeddingVector v = MockEmbed("", 16, 42);
  CHECK(v.dim() == 16);
  for (float x : v.values) CHECK(x == 0.0f);
}

TEST_CASE("mock embed matches the rule and is deterministic") {
  for (const char* text : {"chest pain", "Severe CHEST pain, radiating!", "a a a", "x"}) {
    const EmbeddingVector v = MockEmbed(text, 64, 42);
    CHECK(v.values == MockOracle(text, 64, 42));
    CHECK(MockEmbed(text, 64, 42) == v);
  }
}

TEST_CASE("mock embed is order independent") {
  CHECK(MockEmbed("chest pain left arm", 32, 1) == MockEmbed("arm left pain chest", 32, 1));
}

TEST_CASE("mock embed: different seeds differ for the same text") {
  // Collision needs both tokens to land on the same components with the
  // same signs under both seeds; at dim 768 that is ~1e-6 per pair.
  SplitMix64 rng(2024);
  int collisions = 0;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t a = rng.Next(), b = rng.Next();
    collisions += MockEmbed("chest pain", 768, a) == MockEmbed("chest pain", 768, b);
  }
  CHECK(collisions == 0);
}

TEST_CASE("provider config validation") {
  ProviderConfig c;
  c.Validate();
  c.kind = ProviderKind::kFile;
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
  c.path = "x.cvde";
  c.Validate();
  c.endpoint = "http://localhost:1";
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
  ProviderConfig h;
  h.kind = ProviderKind::kHttp;
  CHECK(CodeOf([&] { h.Validate(); }) == ErrorCode::kInvalidArgument);
  CHECK(ParseProviderKind("file") == ProviderKind::kFile);
  CHECK(CodeOf([] { ParseProviderKind("grpc"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("file provider") {
  testing::TempDir dir;
  const EmbeddingStore s = RandomStore(4, 8, 4);
  WriteStore(s, dir / "s.cvde");
  ProviderConfig cfg;
  cfg.kind = ProviderKind::kFile;
  cfg.dim = 8;
  cfg.path = dir / "s.cvde";
  CHECK(EmbedText(cfg, "id-2", "ignored").values ==
        std::vector<float>(s.Row("id-2").begin(), s.Row("id-2").end()));
  CHECK(CodeOf([&] { EmbedText(cfg, "absent", "x"); }) == ErrorCode::kMissingId);
  cfg.dim = 9;
  CHECK(CodeOf([&] { EmbedText(cfg, "id-2", "x"); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("mock and file providers are substitutable") {
  const MockProvider mock(16, 7);
  EmbeddingStore s(16);
  const std::vector<std::pair<std::string, std::string>> texts = {{"a", "chest pain"},
                                                                  {"b", "mild fatigue"}};
  for (const auto& [id, text] : texts) s.Add(id, mock.Embed(id, text));
  const FileProvider file(s, 16);
  for (const auto& [id, text] : texts) CHECK(file.Embed(id, text) == mock.Embed(id, text));
  std::vector<EmbeddingRequest> reqs = {{"a", "chest pain"}, {"b", "mild fatigue"}};
  CHECK(file.EmbedBatch(reqs) == mock.EmbedBatch(reqs));
}

TEST_CASE("check embedding") {
  EmbeddingVector v{{1.0f, 2.0f}};
  CheckEmbedding(v, 2, "x");
  CHECK(CodeOf([&] { CheckEmbedding(v, 3, "x"); }) == ErrorCode::kDimensionMismatch);
  v.values[1] = INFINITY;
  CHECK(CodeOf([&] { CheckEmbedding(v, 2, "x"); }) == ErrorCode::kNonFinite);
}
