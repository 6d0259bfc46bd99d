#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ontolink/embedding.hpp"
#include "ontolink/http_provider.hpp"
#include "ontolink/ingest.hpp"
#include "ontolink/pipeline.hpp"
#include "ontolink/provider.hpp"

namespace ontolink::app {

inline constexpr const char* kLexicalIndexFile = "lexical.json";
inline constexpr const char* kVectorIndexFile = "vectors.bin";

struct AppPaths {
  std::filesystem::path ontology;
  std::filesystem::path dump;
  std::filesystem::path index_dir;
  std::filesystem::path prompts_dir;
};

struct ProviderSettings {
  std::string kind = "mock";  // mock | http
  std::filesystem::path mock_fixture;
  HttpSettings http;
};

struct EmbeddingSettings {
  std::string kind = "hashing";  // hashing | http
  std::size_t dimension = kDefaultEmbeddingDimension;
  HttpSettings http;
};

/// {"paths": {...}, "pipeline": {"tau", "max_hops", "k_lex", "k_sem", "k_tot"},
///  "provider": {"kind", "mock_fixture", "endpoint", "model", "api_key_env",
///               "timeout_ms", "retries"},
///  "embedding": {"kind", "dimension", ...http keys},
///  "ingest": <ingest config object> | "<path to one>"}
/// Relative paths resolve against the config file's directory.
struct AppConfig {
  AppPaths paths;
  PipelineConfig pipeline;
  ProviderSettings provider;
  EmbeddingSettings embedding;
  IngestConfig ingest = IngestConfig::foodon_defaults();

  /// Throws ConfigError.
  static AppConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& file);
  void validate() const;
};

/// Throws ConfigError.
std::unique_ptr<CompletionProvider> make_completion_provider(const ProviderSettings& settings);
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings);

/// Reads a whole JSON file. Throws ConfigError when the file is missing and
/// SchemaError when it does not parse.
nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace ontolink::app
