#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontolink/entity.hpp"

namespace ontolink {

/// Lowercases ASCII and splits on every non-alphanumeric byte. Bytes >= 0x80
/// are kept inside tokens so UTF-8 words survive intact. No stemming, no
/// stopwords.
std::vector<std::string> tokenize(std::string_view text);

enum class Field : std::uint8_t { label = 0, synonyms = 1, definition = 2, relations = 3 };
inline constexpr std::size_t kFieldCount = 4;

/// The four indexed texts of a record, in Field order. The "Undefined"
/// definition sentinel contributes no text.
std::array<std::string, kFieldCount> field_texts(const EntityRecord& record);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  std::array<double, kFieldCount> boosts{3.0, 2.0, 1.0, 0.5};

  friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

/// A retrieved concept. Hits are ordered by score descending, then CURIE
/// ascending.
struct ScoredHit {
  std::string curie;
  double score = 0.0;
  std::optional<std::string> matched_surface;

  friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

bool hit_order(const ScoredHit& a, const ScoredHit& b);

/// Inverted index with per-field BM25:
///
///   score(d) = sum_f boost_f * sum_{t in q} idf_f(t) * tf (k1 + 1) / (tf + k1 (1 - b + b |d_f| / avg_f))
///   idf_f(t) = ln(1 + (N - df_f(t) + 0.5) / (df_f(t) + 0.5))
///
/// Query tokens are deduplicated before scoring. Document ids follow CURIE
/// order, so ties on score resolve by ascending CURIE.
class LexicalIndex {
 public:
  struct Posting {
    std::uint32_t doc;
    Field field;
    std::uint32_t tf;
  };

  LexicalIndex() = default;

  /// Throws DuplicateCurie.
  static LexicalIndex build(std::span<const EntityRecord> records, const Bm25Params& params = {});

  std::vector<ScoredHit> search(std::string_view query, std::size_t k) const;

  std::size_t doc_count() const noexcept { return curies_.size(); }
  const std::string& curie(std::size_t doc) const { return curies_.at(doc); }
  const Bm25Params& params() const noexcept { return params_; }
  std::size_t vocabulary_size() const noexcept { return postings_.size(); }
  const std::vector<Posting>* postings(std::string_view token) const;
  double average_length(Field f) const { return avg_lengths_[static_cast<std::size_t>(f)]; }

  /// 0 when the token does not occur in that field of that concept.
  std::uint32_t term_frequency(std::string_view curie, Field field, std::string_view token) const;

  /// JSON persistence; loading reproduces query results exactly.
  void save(std::ostream& out) const;
  static LexicalIndex load(std::istream& in);

 private:
  struct TermEntry {
    std::array<std::uint32_t, kFieldCount> df{};
    std::vector<Posting> postings;
  };

  void finalize();
  std::optional<std::size_t> doc_of(std::string_view curie) const;

  Bm25Params params_;
  std::vector<std::string> curies_;
  std::vector<std::array<std::uint32_t, kFieldCount>> lengths_;
  std::vector<std::vector<std::string>> surfaces_;  // label first, then synonyms
  std::array<double, kFieldCount> avg_lengths_{};
  std::unordered_map<std::string, TermEntry> postings_;
};

inline LexicalIndex build_lexical_index(std::span<const EntityRecord> records, const Bm25Params& params = {}) {
  return LexicalIndex::build(records, params);
}

inline std::vector<ScoredHit> search_lexical(const LexicalIndex& index, std::string_view query, std::size_t k) {
  return index.search(query, k);
}

}  // namespace ontolink
