#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/entity.hpp"
#include "ontolink/ntriples.hpp"

namespace ontolink {

namespace vocab {
inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdfs_label = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view rdfs_subclass_of = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view owl_class = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view owl_deprecated = "http://www.w3.org/2002/07/owl#deprecated";
inline constexpr std::string_view owl_on_property = "http://www.w3.org/2002/07/owl#onProperty";
inline constexpr std::string_view owl_some_values_from = "http://www.w3.org/2002/07/owl#someValuesFrom";
inline constexpr std::string_view owl_all_values_from = "http://www.w3.org/2002/07/owl#allValuesFrom";
inline constexpr std::string_view owl_has_value = "http://www.w3.org/2002/07/owl#hasValue";
inline constexpr std::string_view skos_concept = "http://www.w3.org/2004/02/skos/core#Concept";
inline constexpr std::string_view skos_pref_label = "http://www.w3.org/2004/02/skos/core#prefLabel";
inline constexpr std::string_view skos_alt_label = "http://www.w3.org/2004/02/skos/core#altLabel";
inline constexpr std::string_view skos_definition = "http://www.w3.org/2004/02/skos/core#definition";
inline constexpr std::string_view skos_broader = "http://www.w3.org/2004/02/skos/core#broader";
inline constexpr std::string_view iao_definition = "http://purl.obolibrary.org/obo/IAO_0000115";
inline constexpr std::string_view obo_exact_synonym = "http://www.geneontology.org/formats/oboInOwl#hasExactSynonym";
inline constexpr std::string_view obo_related_synonym = "http://www.geneontology.org/formats/oboInOwl#hasRelatedSynonym";
inline constexpr std::string_view obo_broad_synonym = "http://www.geneontology.org/formats/oboInOwl#hasBroadSynonym";
inline constexpr std::string_view obo_narrow_synonym = "http://www.geneontology.org/formats/oboInOwl#hasNarrowSynonym";
}  // namespace vocab

struct PrefixEntry {
  std::string prefix;
  std::string iri_base;
};

/// Bidirectional CURIE <-> IRI mapping. Prefixes and IRI bases are unique,
/// so the longest matching base is always unambiguous.
class PrefixMap {
 public:
  PrefixMap() = default;
  explicit PrefixMap(std::vector<PrefixEntry> entries);

  /// Throws ConfigError on an empty or duplicate prefix/base.
  void add(std::string prefix, std::string iri_base);

  /// Longest-base match; the remainder becomes the local id. An empty local
  /// id is not a CURIE.
  std::optional<std::string> to_curie(std::string_view iri) const;
  std::optional<std::string> expand(std::string_view curie) const;

  const std::vector<PrefixEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<PrefixEntry> entries_;
};

std::optional<std::string> to_curie(std::string_view iri, const PrefixMap& prefixes);

struct RelationSpec {
  std::string curie;
  std::string name;
};

struct IdPattern {
  std::string prefix;
  std::string regex;
};

struct IngestConfig {
  PrefixMap prefixes;
  std::vector<RelationSpec> relations;
  std::vector<IdPattern> id_patterns;
  std::vector<std::string> concept_classes{std::string(vocab::owl_class),
                                           std::string(vocab::skos_concept)};

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// FoodOn-oriented defaults: OBO prefixes for FOODON and its usual
  /// imports, `rdfs:subClassOf` reported as `is_a`.
  static IngestConfig foodon_defaults();

  /// Reads {"prefixes": {...}, "relations": [{"curie","name"}],
  /// "id_patterns": {...}, "concept_classes": [...]}.
  static IngestConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Compiled identifier patterns. Patterns are matched against the whole CURIE.
class CurieValidator {
 public:
  explicit CurieValidator(const IngestConfig& config);
  bool operator()(std::string_view curie) const;

 private:
  std::map<std::string, std::regex, std::less<>> patterns_;
};

bool validate_curie(std::string_view curie, const IngestConfig& config);

namespace skip_reason {
inline constexpr std::string_view not_a_concept = "not_a_concept";
inline constexpr std::string_view no_curie = "no_curie";
inline constexpr std::string_view invalid_identifier = "invalid_identifier";
inline constexpr std::string_view deprecated = "deprecated";
inline constexpr std::string_view no_label = "no_label";
}  // namespace skip_reason

/// Counts over every typed IRI subject: emitted + skipped == typed_subjects.
struct IngestReport {
  std::size_t typed_subjects = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skipped_by_reason;

  nlohmann::ordered_json to_json() const;
};

struct IngestResult {
  std::vector<EntityRecord> records;  // sorted by CURIE
  IngestReport report;
};

IngestResult extract_entities(const TripleSet& triples, const IngestConfig& config);

}  // namespace ontolink
