#include "ontolink/http_provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path below the origin, no trailing '/'
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) e.prefix = url.substr(path_start);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

void HttpSettings::validate() const {
  split_url(base_url);
  if (model.empty()) throw ConfigError("http provider: model is required");
  if (retries < 0) throw ConfigError("http provider: retries must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("http provider: timeout must be positive");
}

HttpSettings HttpSettings::from_json(const nlohmann::json& j) {
  HttpSettings s;
  try {
    s.base_url = j.value("endpoint", s.base_url);
    s.model = j.value("model", s.model);
    s.api_key_env = j.value("api_key_env", s.api_key_env);
    s.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long long>(s.timeout.count())));
    s.retries = j.value("retries", s.retries);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("provider settings: ") + e.what());
  }
  return s;
}

nlohmann::json post_json(const HttpSettings& settings, const std::string& path, const nlohmann::json& body) {
  const auto endpoint = split_url(settings.base_url);
  httplib::Client client(endpoint.origin);
  const auto secs = settings.timeout.count() / 1000;
  const auto usecs = (settings.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!settings.api_key_env.empty()) {
    if (const char* key = std::getenv(settings.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= settings.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
    auto res = client.Post(endpoint.prefix + path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      auto parsed = nlohmann::json::parse(res->body, nullptr, false);
      if (parsed.is_discarded()) throw ProviderError("endpoint returned invalid JSON");
      return parsed;
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!retryable(res->status)) break;
  }
  throw ProviderError(settings.base_url + path + ": " + last_error);
}

HttpCompletionProvider::HttpCompletionProvider(HttpSettings settings) : settings_(std::move(settings)) {
  settings_.validate();
}

std::string HttpCompletionProvider::complete(const CompletionRequest& request) {
  const nlohmann::json body = {
      {"model", settings_.model},
      {"temperature", 0},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}}, {{"role", "user"}, {"content", request.user_text}}}},
  };
  const auto res = post_json(settings_, "/chat/completions", body);
  try {
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("completion response lacks choices[0].message.content");
  }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpSettings settings, std::size_t dimension)
    : settings_(std::move(settings)), dimension_(dimension) {
  settings_.validate();
  if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<double> HttpEmbeddingProvider::embed(std::string_view text) const {
  const std::string t(text);
  return embed_batch(std::span<const std::string>(&t, 1)).at(0);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  const nlohmann::json body = {{"model", settings_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto res = post_json(settings_, "/embeddings", body);
  std::vector<std::vector<double>> out(texts.size());
  try {
    const auto& data = res.at("data");
    if (data.size() != texts.size()) throw ProviderError("embedding response has the wrong number of rows");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto idx = data[i].value("index", i);
      if (idx >= out.size()) throw ProviderError("embedding response index out of range");
      out[idx] = data[i].at("embedding").get<std::vector<double>>();
      if (out[idx].size() != dimension_) throw DimensionMismatch(dimension_, out[idx].size());
      normalize(out[idx]);
    }
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("embedding response lacks data[].embedding");
  }
  return out;
}

}  // namespace ontolink
