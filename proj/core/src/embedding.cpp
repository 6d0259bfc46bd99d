#include "ontolink/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "ontolink/lexical_index.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
constexpr std::uint64_t kSeed = 0x6f6e746f6c696e6bULL;
}  // namespace

std::vector<std::vector<double>> EmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

std::string embedding_text(const EntityRecord& r) {
  std::string out = r.label;
  if (!r.synonyms.empty()) out += "; synonyms: " + text::join(r.synonyms, ", ");
  if (r.has_definition()) out += "; " + r.definition;
  return out;
}

std::uint64_t token_hash(std::string_view token) {
  std::uint64_t h = kFnvOffset ^ kSeed;
  for (const char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

void normalize(std::vector<double>& v) {
  double sq = 0.0;
  for (const double x : v) sq += x * x;
  if (sq == 0.0 || !std::isfinite(sq)) {
    std::fill(v.begin(), v.end(), 0.0);
    if (!v.empty()) v[0] = 1.0;
    return;
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
}

std::vector<double> fallback_embed(std::string_view text, std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
  std::vector<double> v(dimension, 0.0);
  for (const auto& token : tokenize(text)) v[token_hash(token) % dimension] += 1.0;
  normalize(v);
  return v;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::string HashingEmbedder::name() const { return "hashing-bow-v1/" + std::to_string(dimension_); }

std::vector<double> HashingEmbedder::embed(std::string_view text) const { return fallback_embed(text, dimension_); }

}  // namespace ontolink
