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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <json.hpp>
#include <thread>

#include "cvdrisk/embed.h"
#include "cvdrisk/error.h"

using namespace cvdrisk;
using nlohmann::json;

namespace {

// An embedding service on a loopback port. The reply is chosen by the mode.
class FakeService {
 public:
  enum class Mode { kOk, kShort, kWrongDim, kServerError, kNotJson, kFewerVectors, kSlow, kNaN };

  FakeService() {
    server_.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      const json body = json::parse(req.body);
      last_texts_ = body["texts"].get<std::vector<std::string>>();
      Reply(last_texts_, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  void set_mode(Mode m) { mode_ = m; }
  int calls() const { return calls_; }
  const std::vector<std::string>& last_texts() const { return last_texts_; }

  static std::vector<float> VectorFor(const std::string& text, size_t dim) {
    std::vector<float> v(dim);
    for (size_t i = 0; i < dim; ++i) v[i] = static_cast<float>(text.size() + i) / 8.0f;
    return v;
  }

 private:
  void Reply(const std::vector<std::string>& texts, httplib::Response& res) {
    const size_t dim = mode_ == Mode::kShort ? 767 : kDim;
    json vectors = json::array();
    for (const auto& t : texts) vectors.push_back(VectorFor(t, dim));
    if (mode_ == Mode::kFewerVectors) vectors.erase(vectors.begin());
    if (mode_ == Mode::kNaN) vectors[0][3] = 1e300;
    json reply = {{"dim", mode_ == Mode::kWrongDim ? 767 : kDim}, {"vectors", vectors}};
    if (mode_ == Mode::kShort) reply.erase("dim");
    switch (mode_) {
      case Mode::kServerError:
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      case Mode::kNotJson:
        res.set_content("<html>", "text/html");
        return;
      case Mode::kSlow:
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        break;
      default:
        break;
    }
    res.set_content(reply.dump(), "application/json");
  }

  static constexpr size_t kDim = 768;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<Mode> mode_{Mode::kOk};
  std::atomic<int> calls_{0};
  std::vector<std::string> last_texts_;
};

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("http provider round-trip and request shape") {
  FakeService svc;
  const HttpProvider p(svc.endpoint(), 768, std::chrono::milliseconds(2000));
  const EmbeddingVector v = p.Embed("r1", "chest pain");
  CHECK(v.values == FakeService::VectorFor("chest pain", 768));
  CHECK(svc.last_texts() == std::vector<std::string>{"chest pain"});

  const std::vector<EmbeddingRequest> reqs = {{"a", "one"}, {"b", "three"}};
  const auto batch = p.EmbedBatch(reqs);
  REQUIRE(batch.size() == 2);
  CHECK(batch[1].values == FakeService::VectorFor("three", 768));
  CHECK(svc.last_texts() == std::vector<std::string>{"one", "three"});
}

TEST_CASE("http provider trailing slash in the endpoint") {
  FakeService svc;
  const HttpProvider p(svc.endpoint() + "/", 768, std::chrono::milliseconds(2000));
  CHECK(p.Embed("r", "x").dim() == 768);
}

TEST_CASE("http provider: 767 components with dim 768 is a dimension mismatch") {
  FakeService svc;
  svc.set_mode(FakeService::Mode::kShort);
  const HttpProvider p(svc.endpoint(), 768, std::chrono::milliseconds(2000));
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("http provider error mapping") {
  FakeService svc;
  const HttpProvider p(svc.endpoint(), 768, std::chrono::milliseconds(2000));
  svc.set_mode(FakeService::Mode::kWrongDim);
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kDimensionMismatch);
  svc.set_mode(FakeService::Mode::kServerError);
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kNetwork);
  svc.set_mode(FakeService::Mode::kNotJson);
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kMalformedResponse);
  svc.set_mode(FakeService::Mode::kFewerVectors);
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kMalformedResponse);
  svc.set_mode(FakeService::Mode::kNaN);
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kNonFinite);
}

TEST_CASE("http provider timeout") {
  FakeService svc;
  svc.set_mode(FakeService::Mode::kSlow);
  const HttpProvider p(svc.endpoint(), 768, std::chrono::milliseconds(150));
  CHECK(CodeOf([&] { p.Embed("r", "x"); }) == ErrorCode::kTimeout);
}

TEST_CASE("http provider: unreachable service is a network error") {
  // Bind an ephemeral port, then close it so nothing listens there.
  int port = 0;
  {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    ::close(fd);
  }
  const HttpProvider p("http://127.0.0.1:" + std::to_string(port), 4, std::chrono::milliseconds(500));
  CHECK(CodeOf([&] { p.Embed("rec-9", "x"); }) == ErrorCode::kNetwork);
  try {
    p.Embed("rec-9", "x");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rec-9") != std::string::npos);
  }
}

TEST_CASE("http provider endpoint validation") {
  CHECK(CodeOf([] { HttpProvider("https://example.org", 4, std::chrono::milliseconds(1)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { HttpProvider("example.org", 4, std::chrono::milliseconds(1)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("http provider through EmbedText") {
  FakeService svc;
  ProviderConfig cfg;
  cfg.kind = ProviderKind::kHttp;
  cfg.endpoint = svc.endpoint();
  cfg.timeout = std::chrono::milliseconds(2000);
  CHECK(EmbedText(cfg, "r", "abc").values == FakeService::VectorFor("abc", 768));
}

TEST_CASE("http provider is safe for concurrent calls") {
  FakeService svc;
  const HttpProvider p(svc.endpoint(), 768, std::chrono::milliseconds(5000));
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      const std::string text(static_cast<size_t>(t + 1), 'x');
      if (p.Embed("r", text).values == FakeService::VectorFor(text, 768)) ++ok;
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 4);
}
