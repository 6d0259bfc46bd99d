#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ontolink/entity.hpp"

namespace ontolink {

inline constexpr std::size_t kDefaultEmbeddingDimension = 384;

/// Text encoder contract. Implementations report failures as ProviderError.
/// Returned vectors need not be normalized; the index layer normalizes them.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;

  /// Defaults to one embed() call per text.
  virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const;
};

/// Concept text fed to the encoder:
///   label[; synonyms: s1, s2, ...][; definition]
std::string embedding_text(const EntityRecord& record);

/// Deterministic offline stand-in for a neural encoder: a hashed bag of
/// tokens, L2-normalized. Text without tokens maps to the basis vector e_0.
std::vector<double> fallback_embed(std::string_view text, std::size_t dimension);

/// 64-bit FNV-1a with a fixed seed and a splitmix64 finalizer.
std::uint64_t token_hash(std::string_view token);

class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = kDefaultEmbeddingDimension);

  std::string name() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

/// Scales `v` to unit L2 norm in place. A zero vector becomes e_0.
void normalize(std::vector<double>& v);

}  // namespace ontolink
