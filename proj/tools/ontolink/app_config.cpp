#include "ontolink/app_config.hpp"

#include <fstream>

#include "ontolink/errors.hpp"
#include "ontolink/mock_provider.hpp"

namespace ontolink::app {

namespace {

std::filesystem::path resolve(const nlohmann::json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  std::filesystem::path p = j.at(key).get<std::string>();
  return p.is_relative() ? base / p : p;
}

HttpSettings http_from(const nlohmann::json& j, HttpSettings fallback) {
  HttpSettings s = HttpSettings::from_json(j);
  if (!j.contains("endpoint")) s.base_url = fallback.base_url;
  return s;
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
}

AppConfig AppConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  AppConfig c;
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.ontology = resolve(p, "ontology", base);
      c.paths.dump = resolve(p, "dump", base);
      c.paths.index_dir = resolve(p, "index_dir", base);
      c.paths.prompts_dir = resolve(p, "prompts_dir", base);
    }
    if (j.contains("pipeline")) {
      const auto& p = j.at("pipeline");
      c.pipeline.tau = p.value("tau", c.pipeline.tau);
      c.pipeline.max_hops = p.value("max_hops", c.pipeline.max_hops);
      c.pipeline.retrieval.k_lex = p.value("k_lex", c.pipeline.retrieval.k_lex);
      c.pipeline.retrieval.k_sem = p.value("k_sem", c.pipeline.retrieval.k_sem);
      c.pipeline.retrieval.k_tot = p.value("k_tot", c.pipeline.retrieval.k_lex + c.pipeline.retrieval.k_sem);
    }
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      c.provider.kind = p.value("kind", c.provider.kind);
      c.provider.mock_fixture = resolve(p, "mock_fixture", base);
      c.provider.http = http_from(p, c.provider.http);
    }
    if (j.contains("embedding")) {
      const auto& e = j.at("embedding");
      c.embedding.kind = e.value("kind", c.embedding.kind);
      c.embedding.dimension = e.value("dimension", c.embedding.dimension);
      c.embedding.http = http_from(e, c.embedding.http);
    }
    if (j.contains("ingest")) {
      const auto& i = j.at("ingest");
      c.ingest = i.is_string() ? IngestConfig::from_json(read_json_file(resolve(j, "ingest", base)))
                               : IngestConfig::from_json(i);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& file) {
  auto base = file.parent_path();
  if (base.empty()) base = ".";
  try {
    return from_json(read_json_file(file), base);
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
}

void AppConfig::validate() const {
  pipeline.validate();
  if (provider.kind != "mock" && provider.kind != "http") throw ConfigError("provider.kind must be mock or http");
  if (embedding.kind != "hashing" && embedding.kind != "http") {
    throw ConfigError("embedding.kind must be hashing or http");
  }
  if (embedding.dimension == 0) throw ConfigError("embedding.dimension must be positive");
  ingest.validate();
}

std::unique_ptr<CompletionProvider> make_completion_provider(const ProviderSettings& settings) {
  if (settings.kind == "http") return std::make_unique<HttpCompletionProvider>(settings.http);
  if (settings.kind != "mock") throw ConfigError("unknown provider kind: " + settings.kind);
  MockFixture fixture;
  if (!settings.mock_fixture.empty()) fixture = MockFixture::from_json(read_json_file(settings.mock_fixture));
  return std::make_unique<MockProvider>(std::move(fixture));
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings) {
  if (settings.kind == "http") return std::make_unique<HttpEmbeddingProvider>(settings.http, settings.dimension);
  if (settings.kind != "hashing") throw ConfigError("unknown embedding kind: " + settings.kind);
  return std::make_unique<HashingEmbedder>(settings.dimension);
}

}  // namespace ontolink::app
