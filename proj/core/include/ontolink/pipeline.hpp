#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/agents.hpp"
#include "ontolink/prompts.hpp"
#include "ontolink/provider.hpp"
#include "ontolink/retriever.hpp"

namespace ontolink {

struct PipelineConfig {
  double tau = 0.6;
  int max_hops = 1;
  RetrievalConfig retrieval;

  /// Throws ConfigError.
  void validate() const;
};

struct RejectedAlternative {
  std::string curie;
  std::string label;
  std::string explanation;

  friend bool operator==(const RejectedAlternative&, const RejectedAlternative&) = default;
};

/// Attached to a result whose final confidence is below tau.
struct Rejection {
  std::string rationale;
  std::vector<std::string> synonym_proposals;
  std::vector<RejectedAlternative> alternatives;  // at most three

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct LinkResult {
  std::string mention;
  std::optional<std::string> final_id;  // nullopt == ABSTAIN
  std::optional<std::string> label;
  std::string selector_rationale;
  std::string scorer_rationale;
  double confidence = 0.0;
  int hops = 1;
  bool used_synonyms = false;
  std::optional<std::string> first_id;  // first-pass selection
  std::optional<Rejection> rejection;
  std::optional<std::string> error;  // set when a provider failure aborted the mention

  friend bool operator==(const LinkResult&, const LinkResult&) = default;
};

/// Links one mention: retrieve, select, score, and at most `max_hops`
/// synonym retries when the confidence is below tau. A ProviderError ends
/// the mention with an error-tagged ABSTAIN result.
LinkResult link(const Mention& mention, const RetrievalIndexes& indexes, CompletionProvider& provider,
                const PipelineConfig& config, const PromptLibrary& prompts = PromptLibrary::builtin());

/// One JSON object with a fixed key order:
///   mention, final_id ("-1" for ABSTAIN), label, selector_rationale,
///   scorer_rationale, confidence, hops, used_synonyms, first_id,
///   [rejection_rationale, synonym_proposals, alternatives], [error]
nlohmann::ordered_json result_to_json(const LinkResult& result);
/// Single-line form of result_to_json.
std::string serialize_result(const LinkResult& result);
/// Throws SchemaError.
LinkResult result_from_json(const nlohmann::json& j);
LinkResult parse_result(std::string_view line);

/// Reads JSON-lines results; blank lines are skipped. Throws SchemaError.
std::vector<LinkResult> load_results(std::istream& in);

/// One provider round trip, captured for the run log.
struct RunLogEntry {
  std::size_t mention_index = 0;
  std::string role;
  std::string prompt_version;
  std::string system_text;
  std::string user_text;
  std::string response;
  std::string error;
  double elapsed_ms = 0.0;
};

nlohmann::ordered_json log_entry_to_json(const RunLogEntry& entry);

/// Links every mention with up to `jobs` worker threads. Output order follows
/// input order; failures are isolated per mention. When `log` is given it
/// receives every provider call grouped by mention index. The provider must
/// be safe to call concurrently when jobs > 1.
std::vector<LinkResult> link_batch(std::span<const Mention> mentions, const RetrievalIndexes& indexes,
                                   CompletionProvider& provider, const PipelineConfig& config,
                                   std::size_t jobs = 1, const PromptLibrary& prompts = PromptLibrary::builtin(),
                                   std::vector<RunLogEntry>* log = nullptr);

/// JSON array of {"mention": string, "context": optional string}. Throws
/// SchemaError.
std::vector<Mention> load_mentions(std::istream& in);

}  // namespace ontolink
