#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "ontolink/errors.hpp"
#include "ontolink/http_provider.hpp"

using namespace ontolink;

namespace {

// Local OpenAI-compatible stub bound to an ephemeral port.
class StubServer {
 public:
  StubServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Server& server() { return server_; }
  HttpSettings settings() const {
    HttpSettings s;
    s.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    s.model = "stub";
    s.timeout = std::chrono::milliseconds(5000);
    s.retries = 2;
    return s;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("chat completions") {
  StubServer stub;
  std::atomic<int> hits{0};
  std::string seen_auth;
  nlohmann::json seen_body;
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    if (hits++ == 0) {
      res.status = 503;
      res.set_content("busy", "text/plain");
      return;
    }
    res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "{\"chosen_id\": \"-1\"}"}}]})",
                    "application/json");
  });

  ::setenv("ONTOLINK_TEST_KEY", "sekret", 1);
  auto settings = stub.settings();
  settings.api_key_env = "ONTOLINK_TEST_KEY";
  HttpCompletionProvider provider(settings);
  CompletionRequest req;
  req.system_text = "sys";
  req.user_text = "usr";
  CHECK(provider.complete(req) == R"({"chosen_id": "-1"})");
  CHECK(hits == 2);
  CHECK(seen_auth == "Bearer sekret");
  CHECK(seen_body.at("model") == "stub");
  CHECK(seen_body.at("temperature") == 0);
  REQUIRE(seen_body.at("messages").size() == 2);
  CHECK(seen_body.at("messages")[0].at("role") == "system");
  CHECK(seen_body.at("messages")[1].at("content") == "usr");
}

TEST_CASE("client errors are not retried") {
  StubServer stub;
  std::atomic<int> hits{0};
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  HttpCompletionProvider provider(stub.settings());
  CHECK_THROWS_AS(provider.complete({}), ProviderError);
  CHECK(hits == 1);
}

TEST_CASE("malformed completion bodies") {
  StubServer stub;
  stub.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices": []})", "application/json");
  });
  HttpCompletionProvider provider(stub.settings());
  CHECK_THROWS_AS(provider.complete({}), ProviderError);
}

TEST_CASE("unreachable endpoint") {
  HttpSettings s;
  s.base_url = "http://127.0.0.1:1/v1";
  s.model = "x";
  s.retries = 0;
  s.timeout = std::chrono::milliseconds(500);
  HttpCompletionProvider provider(s);
  CHECK_THROWS_AS(provider.complete({}), ProviderError);
}

TEST_CASE("embeddings") {
  StubServer stub;
  stub.server().Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    auto data = nlohmann::json::array();
    const auto& input = body.at("input");
    // Reverse order to exercise the index field.
    for (std::size_t i = input.size(); i-- > 0;) {
      data.push_back({{"index", i}, {"embedding", {3.0, 4.0 + static_cast<double>(i), 0.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  HttpEmbeddingProvider provider(stub.settings(), 3);
  CHECK(provider.name() == "http:stub/3");
  const auto v = provider.embed("salt");
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
  const std::vector<std::string> texts{"a", "b"};
  const auto batch = provider.embed_batch(texts);
  REQUIRE(batch.size() == 2);
  CHECK(batch[1][1] == doctest::Approx(5.0 / std::sqrt(34.0)));

  HttpEmbeddingProvider wrong(stub.settings(), 4);
  CHECK_THROWS_AS(wrong.embed("salt"), DimensionMismatch);
}

TEST_CASE("settings") {
  const auto s = HttpSettings::from_json(
      nlohmann::json::parse(R"({"endpoint": "https://api.example.com/v1", "model": "m", "timeout_ms": 10, "retries": 0})"));
  CHECK(s.base_url == "https://api.example.com/v1");
  CHECK(s.timeout == std::chrono::milliseconds(10));
  CHECK_NOTHROW(s.validate());
  HttpSettings bad;
  bad.base_url = "no-scheme";
  bad.model = "m";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
