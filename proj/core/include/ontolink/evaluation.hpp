#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/dump.hpp"
#include "ontolink/entity.hpp"
#include "ontolink/pipeline.hpp"
#include "ontolink/prompts.hpp"
#include "ontolink/provider.hpp"

namespace ontolink {

struct GoldAnnotation {
  std::string mention;
  std::vector<std::string> targets;
};

/// The per-mention facts the metrics need. nullopt stands for ABSTAIN.
struct RunRecord {
  std::string mention;
  std::optional<std::string> y_first;
  std::optional<std::string> y_final;
  int hops = 1;
  bool used_synonyms = false;

  /// Error-tagged results count as a final ABSTAIN.
  static RunRecord from(const LinkResult& result);
};

struct EvalReport {
  std::size_t m = 0;
  double acc1_overall = 0.0;
  double acc1_first = 0.0;
  double acc1_final = 0.0;
  double retry_rate = 0.0;
  double synonym_rate = 0.0;
};

/// Joins records to gold by exact mention string. Throws EmptyRun,
/// MissingGold, or SchemaError for duplicate gold mentions.
EvalReport compute_metrics(std::span<const RunRecord> records, std::span<const GoldAnnotation> gold);

nlohmann::ordered_json report_to_json(const EvalReport& report, std::optional<double> tau = std::nullopt);

/// JSON array of {"mention": string, "targets": [CURIE, ...]}. Throws
/// SchemaError.
std::vector<GoldAnnotation> load_gold(std::istream& in);

enum class DriftLabel {
  Exact_Match,
  Class_vs_Taxon,
  Hierarchy_Drift,
  Synonym_or_Lexical,
  Cross_Ontology_Equivalent,
  Dataset_Annotation_Error,
  Model_Incorrect,
  Other,
};

inline constexpr std::array<DriftLabel, 8> kAllDriftLabels = {
    DriftLabel::Exact_Match,          DriftLabel::Class_vs_Taxon,
    DriftLabel::Hierarchy_Drift,      DriftLabel::Synonym_or_Lexical,
    DriftLabel::Cross_Ontology_Equivalent, DriftLabel::Dataset_Annotation_Error,
    DriftLabel::Model_Incorrect,      DriftLabel::Other,
};

std::string_view to_string(DriftLabel label);
std::optional<DriftLabel> parse_drift_label(std::string_view s);

struct AdjudicationLabel {
  DriftLabel label = DriftLabel::Other;
  std::string selected_gold;
  std::string note;
};

/// Classifies a prediction/gold disagreement. Identical CURIEs give
/// Exact_Match without a provider call. Unparseable answers, labels outside
/// the taxonomy and gold choices outside the gold set become Other with a
/// note. Throws std::invalid_argument on an empty gold list; ProviderError
/// propagates.
AdjudicationLabel adjudicate(CompletionProvider& provider, std::string_view query, const EntityRecord& chosen,
                             std::span<const EntityRecord> gold_records,
                             const PromptLibrary& prompts = PromptLibrary::builtin());

/// One case to adjudicate: a final prediction outside the gold set.
struct AdjudicationCase {
  std::string query;
  std::string chosen;
  std::vector<std::string> gold;
};

/// Results whose final id is a concept not in the gold targets. Abstentions
/// and error-tagged results are skipped. Throws MissingGold.
std::vector<AdjudicationCase> find_mismatches(std::span<const LinkResult> results,
                                              std::span<const GoldAnnotation> gold);

nlohmann::ordered_json case_to_json(const AdjudicationCase& c);
/// Throws SchemaError.
std::vector<AdjudicationCase> load_cases(std::istream& in);

/// {query, chosen, selected_gold, label}
nlohmann::ordered_json adjudication_to_json(const AdjudicationCase& c, const AdjudicationLabel& label);

struct LabelShare {
  DriftLabel label;
  std::size_t count = 0;
  double percent = 0.0;  // one decimal, rounded half-up
};

/// Labels that occur at least once, in taxonomy order.
std::vector<LabelShare> label_distribution(std::span<const AdjudicationLabel> labels);
std::vector<LabelShare> label_distribution(std::span<const DriftLabel> labels);

/// count/total * 100 rounded half-up to one decimal, computed exactly in
/// integers.
double percent_one_decimal(std::size_t count, std::size_t total);

nlohmann::ordered_json distribution_to_json(std::span<const LabelShare> shares);

/// "http://purl.obolibrary.org/obo/" + CURIE with ':' replaced by '_'.
std::string obo_purl(std::string_view curie);

/// Side-by-side rows for the comparator. Both runs must cover the same
/// mentions; otherwise throws MentionMismatch listing the unaligned ones.
nlohmann::ordered_json export_comparison(std::span<const LinkResult> run_a, std::span<const LinkResult> run_b,
                                         const RecordStore& records, std::string_view name_a = "system_a",
                                         std::string_view name_b = "system_b");

}  // namespace ontolink
