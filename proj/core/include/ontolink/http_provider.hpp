#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "ontolink/embedding.hpp"
#include "ontolink/provider.hpp"

namespace ontolink {

/// Endpoint settings for an OpenAI-compatible API.
struct HttpSettings {
  std::string base_url = "http://localhost:8000/v1";
  std::string model;
  std::string api_key_env = "ONTOLINK_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int retries = 2;

  /// Throws ConfigError.
  void validate() const;
  static HttpSettings from_json(const nlohmann::json& j);
};

/// POSTs {base_url}/chat/completions with temperature 0 and returns
/// choices[0].message.content. Transport errors, 429 and 5xx are retried.
class HttpCompletionProvider final : public CompletionProvider {
 public:
  explicit HttpCompletionProvider(HttpSettings settings);

  std::string name() const override { return "http:" + settings_.model; }
  std::string complete(const CompletionRequest& request) override;

 private:
  HttpSettings settings_;
};

/// POSTs {base_url}/embeddings and returns unit vectors.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(HttpSettings settings, std::size_t dimension);

  std::string name() const override { return "http:" + settings_.model + "/" + std::to_string(dimension_); }
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const override;

 private:
  HttpSettings settings_;
  std::size_t dimension_;
};

/// POSTs `body` to `path` under `base_url` with bearer auth and retries, and
/// returns the parsed response. Throws ProviderError.
nlohmann::json post_json(const HttpSettings& settings, const std::string& path, const nlohmann::json& body);

}  // namespace ontolink
