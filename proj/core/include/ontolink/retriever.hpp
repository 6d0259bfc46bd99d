#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ontolink/dump.hpp"
#include "ontolink/embedding.hpp"
#include "ontolink/lexical_index.hpp"
#include "ontolink/vector_index.hpp"

namespace ontolink {

struct RetrievalConfig {
  std::size_t k_lex = 15;
  std::size_t k_sem = 15;
  std::size_t k_tot = 30;
  std::size_t snippet_chars = 300;
  std::size_t top_synonyms = 5;
  std::size_t relation_targets = 3;

  /// Throws ConfigError when k_tot > k_lex + k_sem.
  void validate() const;

  friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

/// A surface mention with optional local context.
struct Mention {
  std::string text;
  std::optional<std::string> context;

  /// Throws std::invalid_argument when the text is blank.
  void validate() const;
};

enum class Branch { lexical, semantic };
std::string_view to_string(Branch b);

struct RelationShown {
  std::string name;
  std::vector<std::string> targets;

  friend bool operator==(const RelationShown&, const RelationShown&) = default;
};

/// A retrieved concept with its provenance and prompt payload.
struct Candidate {
  std::string curie;
  std::string label;
  std::optional<std::string> matched_surface;
  std::vector<std::string> synonyms_shown;
  std::string definition_snippet;
  std::vector<RelationShown> relations_shown;
  Branch branch = Branch::lexical;
  std::size_t branch_rank = 0;
  /// Label followed by every synonym; used by the tie-break rules.
  std::vector<std::string> surface_forms;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Prompt payload for one hit. Definitions longer than `snippet_chars` code
/// points are cut and suffixed with "…". Throws UnknownCurie.
Candidate candidate_payload(const RecordStore& records, const ScoredHit& hit, Branch branch, std::size_t rank,
                            const RetrievalConfig& config);

/// Everything retrieval needs; all members must be built over the same dump.
struct RetrievalIndexes {
  const RecordStore& records;
  const LexicalIndex& lexical;
  const VectorIndex& vectors;
  const EmbeddingProvider& embedder;
};

/// Query text for the semantic branch: the mention, then the context after a
/// single space when present.
std::string semantic_query_text(const Mention& mention);

/// 0: a surface form equals the mention (case-insensitive);
/// 1: the label or a single synonym contains every mention token;
/// 2: anything else.
int match_tier(const Candidate& candidate, std::string_view mention);

/// Deduplicates by CURIE keeping the first occurrence, stably moves tier-0
/// then tier-1 candidates to the front, and truncates to k_tot.
std::vector<Candidate> order_candidates(std::vector<Candidate> candidates, std::string_view mention, std::size_t k_tot);

/// Lexical list followed by the semantic list, then order_candidates.
std::vector<Candidate> fuse_branches(std::vector<Candidate> lexical, std::vector<Candidate> semantic,
                                     std::string_view mention, std::size_t k_tot);

/// Round-robin interleave of several candidate lists (first items of every
/// list, then second items, ...).
std::vector<Candidate> interleave(const std::vector<std::vector<Candidate>>& lists);

/// Runs both branches for `mention` and fuses them.
std::vector<Candidate> retrieve(const Mention& mention, const RetrievalIndexes& indexes, const RetrievalConfig& config);

}  // namespace ontolink
