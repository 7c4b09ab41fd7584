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


#include <set>

#include "binary_io.h"
#include "cvdrisk/cli.h"
#include "cvdrisk/error.h"

namespace cvdrisk::cli {
namespace {

using nlohmann::json;

void RejectUnknown(const json& j, const std::set<std::string>& allowed, std::string_view where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw Error(ErrorCode::kParse,
                  "config: unknown key '" + it.key() + "' in " + std::string(where));
    }
  }
}

const json* Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

template <typename T>
T Get(const json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kParse, std::string("config: bad value for '") + key + "'");
  }
}

uint64_t GetCount(const json& v, const char* key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
    throw Error(ErrorCode::kParse, std::string("config: '") + key + "' must be a nonnegative integer");
  }
  return v.get<uint64_t>();
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

json OrNull(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

}  // namespace

PipelineConfig ConfigFromJson(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config: expected a JSON object");
  RejectUnknown(j, {"provider", "forest", "split", "vocab_path", "lexicon_path", "max_len"},
                "top level");
  PipelineConfig cfg;

  if (const json* p = Field(j, "provider")) {
    RejectUnknown(*p, {"kind", "dim", "seed", "path", "endpoint", "timeout_ms"}, "provider");
    ProviderConfig& pc = cfg.provider;
    if (const json* v = Field(*p, "kind")) pc.kind = ParseProviderKind(Get<std::string>(*v, "kind"));
    if (const json* v = Field(*p, "dim")) {
      pc.dim = GetCount(*v, "dim");
      cfg.provider_dim_set = true;
    }
    if (const json* v = Field(*p, "seed")) pc.seed = GetCount(*v, "seed");
    if (const json* v = Field(*p, "path")) pc.path = Resolve(base_dir, Get<std::string>(*v, "path"));
    if (const json* v = Field(*p, "endpoint")) pc.endpoint = Get<std::string>(*v, "endpoint");
    if (const json* v = Field(*p, "timeout_ms")) {
      pc.timeout = std::chrono::milliseconds(GetCount(*v, "timeout_ms"));
    }
  }

  if (const json* f = Field(j, "forest")) {
    RejectUnknown(*f, {"n_estimators", "max_depth", "max_features", "bootstrap", "seed",
                       "min_samples_split"},
                  "forest");
    ForestConfig& fc = cfg.forest;
    if (const json* v = Field(*f, "n_estimators")) fc.n_estimators = GetCount(*v, "n_estimators");
    if (const json* v = Field(*f, "max_depth")) fc.max_depth = GetCount(*v, "max_depth");
    if (const json* v = Field(*f, "max_features")) {
      fc.max_features = v->is_string() ? MaxFeatures::Parse(v->get<std::string>())
                                       : MaxFeatures::Fixed(GetCount(*v, "max_features"));
    }
    if (const json* v = Field(*f, "bootstrap")) fc.bootstrap = Get<bool>(*v, "bootstrap");
    if (const json* v = Field(*f, "seed")) fc.seed = GetCount(*v, "seed");
    if (const json* v = Field(*f, "min_samples_split")) {
      fc.min_samples_split = GetCount(*v, "min_samples_split");
    }
  }

  if (const json* s = Field(j, "split")) {
    RejectUnknown(*s, {"train_fraction", "seed", "stratified"}, "split");
    if (const json* v = Field(*s, "train_fraction")) {
      cfg.split.train_fraction = Get<double>(*v, "train_fraction");
    }
    if (const json* v = Field(*s, "seed")) cfg.split.seed = GetCount(*v, "seed");
    if (const json* v = Field(*s, "stratified")) cfg.split.stratified = Get<bool>(*v, "stratified");
  }

  if (const json* v = Field(j, "vocab_path")) {
    cfg.vocab_path = Resolve(base_dir, Get<std::string>(*v, "vocab_path"));
  }
  if (const json* v = Field(j, "lexicon_path")) {
    cfg.lexicon_path = Resolve(base_dir, Get<std::string>(*v, "lexicon_path"));
  }
  if (const json* v = Field(j, "max_len")) cfg.max_len = GetCount(*v, "max_len");
  return cfg;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = binary::ReadFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return ConfigFromJson(j, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json ConfigToJson(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  const ProviderConfig& p = cfg.provider;
  j["provider"] = {{"kind", ProviderKindName(p.kind)},
                   {"dim", p.dim},
                   {"seed", p.seed},
                   {"path", OrNull(p.path)},
                   {"endpoint", p.endpoint ? json(*p.endpoint) : json(nullptr)},
                   {"timeout_ms", p.timeout.count()}};
  const ForestConfig& f = cfg.forest;
  nlohmann::ordered_json forest;
  forest["n_estimators"] = f.n_estimators;
  forest["max_depth"] = f.max_depth ? json(*f.max_depth) : json(nullptr);
  forest["max_features"] = f.max_features.ToString();
  forest["bootstrap"] = f.bootstrap;
  forest["seed"] = f.seed;
  forest["min_samples_split"] = f.min_samples_split;
  j["forest"] = forest;
  nlohmann::ordered_json split;
  split["train_fraction"] = cfg.split.train_fraction;
  split["seed"] = cfg.split.seed;
  split["stratified"] = cfg.split.stratified;
  j["split"] = split;
  j["vocab_path"] = OrNull(cfg.vocab_path);
  j["lexicon_path"] = OrNull(cfg.lexicon_path);
  j["max_len"] = cfg.max_len;
  return j;
}

}  // namespace cvdrisk::cli
