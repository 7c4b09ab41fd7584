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

#include <httplib.h>

#include <json.hpp>

#include "cvdrisk/embed.h"
#include "cvdrisk/error.h"

namespace cvdrisk {

using nlohmann::json;

HttpProvider::HttpProvider(std::string endpoint, size_t dim,
                           std::chrono::milliseconds timeout)
    : dim_(dim), timeout_(timeout) {
  const size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint '" + endpoint + "' must look like http://host:port[/path]");
  }
  if (endpoint.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint '" + endpoint + "': only plain http is supported");
  }
  const size_t path_start = endpoint.find('/', scheme_end + 3);
  base_ = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = endpoint.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

EmbeddingVector HttpProvider::Embed(std::string_view id, std::string_view text) const {
  const EmbeddingRequest request{id, text};
  return std::move(EmbedBatch({&request, 1}).front());
}

std::vector<EmbeddingVector> HttpProvider::EmbedBatch(
    std::span<const EmbeddingRequest> requests) const {
  if (requests.empty()) return {};
  const std::string first_id(requests.front().id);

  json body;
  body["texts"] = json::array();
  for (const EmbeddingRequest& r : requests) body["texts"].push_back(r.text);

  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(prefix_ + "/embed", body.dump(), "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    const ErrorCode code = err == httplib::Error::ConnectionTimeout ||
                                   err == httplib::Error::Read
                               ? ErrorCode::kTimeout
                               : ErrorCode::kNetwork;
    throw Error(code, "embedding service " + base_ + prefix_ + "/embed failed for '" +
                          first_id + "': " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kNetwork, "embedding service returned HTTP " +
                                         std::to_string(res->status) + " for '" +
                                         first_id + "'");
  }

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse,
                std::string("embedding service reply is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw Error(ErrorCode::kMalformedResponse,
                "embedding service reply lacks a 'vectors' array");
  }
  if (reply.contains("dim")) {
    if (!reply["dim"].is_number_unsigned() || reply["dim"].get<size_t>() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "embedding service reports dim " + reply["dim"].dump() +
                      ", expected " + std::to_string(dim_));
    }
  }
  const json& vectors = reply["vectors"];
  if (vectors.size() != requests.size()) {
    throw Error(ErrorCode::kMalformedResponse,
                "embedding service returned " + std::to_string(vectors.size()) +
                    " vectors for " + std::to_string(requests.size()) + " texts");
  }

  std::vector<EmbeddingVector> out;
  out.reserve(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    const json& row = vectors[i];
    if (!row.is_array()) {
      throw Error(ErrorCode::kMalformedResponse, "embedding service vector " +
                                                     std::to_string(i) + " is not an array");
    }
    EmbeddingVector v;
    v.values.reserve(row.size());
    for (const json& x : row) {
      if (!x.is_number()) {
        throw Error(ErrorCode::kMalformedResponse,
                    "embedding service vector " + std::to_string(i) +
                        " has a non-numeric component");
      }
      v.values.push_back(x.get<float>());
    }
    CheckEmbedding(v, dim_, requests[i].id);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace cvdrisk
