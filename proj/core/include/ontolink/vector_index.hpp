#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ontolink/embedding.hpp"
#include "ontolink/entity.hpp"
#include "ontolink/lexical_index.hpp"

namespace ontolink {

/// Dense store of unit vectors, one row per concept, rows in CURIE order.
/// Queries are exact: every row is scored.
class VectorIndex {
 public:
  VectorIndex() = default;

  /// Throws ProviderError naming the CURIE whose embedding failed.
  static VectorIndex build(std::span<const EntityRecord> records, const EmbeddingProvider& provider);

  /// Rows are normalized on insertion. Throws DimensionMismatch or DuplicateCurie.
  static VectorIndex from_rows(std::string provider_name, std::size_t dimension,
                               std::vector<std::string> curies, const std::vector<std::vector<double>>& rows);

  /// Top-k by cosine similarity (dot product of unit vectors), descending,
  /// ties by ascending CURIE. Throws DimensionMismatch.
  std::vector<ScoredHit> search(std::span<const float> query, std::size_t k) const;

  std::size_t size() const noexcept { return curies_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::string& provider_name() const noexcept { return provider_name_; }
  const std::vector<std::string>& curies() const noexcept { return curies_; }
  std::span<const float> row(std::size_t i) const;

  /// Binary layout (little endian):
  ///   "OLVECIDX" u32 version, u32 dimension, u64 count, u32 name_len, name bytes,
  ///   count*dimension f32 (row-major), then count x (u32 len, CURIE bytes).
  void save(std::ostream& out) const;
  static VectorIndex load(std::istream& in);

 private:
  std::string provider_name_;
  std::size_t dimension_ = 0;
  std::vector<std::string> curies_;
  std::vector<float> data_;
};

inline VectorIndex build_vector_index(std::span<const EntityRecord> records, const EmbeddingProvider& provider) {
  return VectorIndex::build(records, provider);
}

inline std::vector<ScoredHit> search_semantic(const VectorIndex& index, std::span<const float> query, std::size_t k) {
  return index.search(query, k);
}

/// Embeds `text` with `provider` and returns a unit float vector.
std::vector<float> embed_query(const EmbeddingProvider& provider, std::string_view text);

}  // namespace ontolink
