#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/entity.hpp"
#include "ontolink/prompts.hpp"
#include "ontolink/provider.hpp"
#include "ontolink/retriever.hpp"

namespace ontolink {

/// Wire form of an abstention.
inline constexpr std::string_view kAbstainId = "-1";

struct SelectorDecision {
  std::optional<std::string> chosen_id;  // nullopt == ABSTAIN
  std::string explanation;

  bool abstained() const noexcept { return !chosen_id.has_value(); }
};

struct Alternative {
  std::string curie;
  std::string reason;

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// Score in [0, 1]. Alternatives (at most three, all from the candidate
/// list) are only kept when the score is below the threshold.
struct ConfidenceAssessment {
  double score = 0.0;
  std::string explanation;
  std::vector<Alternative> alternatives;
};

/// At most five reformulations, none equal to the original mention.
struct SynonymProposal {
  std::vector<std::string> synonyms;
  std::string failure_reason;
};

/// What the selector is told on a retry pass.
struct RetryFeedback {
  std::string failure_reason;
  std::vector<std::string> reformulations;
};

inline constexpr std::size_t kMaxAlternatives = 3;
inline constexpr std::size_t kMaxSynonyms = 5;

/// Finds the first JSON object in a model response, ignoring markdown code
/// fences and surrounding prose, and checks that `expected_keys` exist.
/// Throws MalformedResponse or MissingKey.
nlohmann::json parse_agent_json(std::string_view response, std::initializer_list<std::string_view> expected_keys = {});

/// Throws EmptyCandidates.
RenderedPrompt render_selector_prompt(const Mention& mention, std::span<const Candidate> candidates,
                                      const RetryFeedback* feedback = nullptr,
                                      const PromptLibrary& prompts = PromptLibrary::builtin());

/// Picks one candidate or abstains. Answers outside the candidate set and
/// unparseable answers become ABSTAIN. ProviderError propagates.
SelectorDecision select(CompletionProvider& provider, const Mention& mention, std::span<const Candidate> candidates,
                        const RetryFeedback* feedback = nullptr,
                        const PromptLibrary& prompts = PromptLibrary::builtin());

/// Rates a non-abstaining decision against the original mention. Scores are
/// clamped to [0, 1]; an unparseable assessment scores 0.
ConfidenceAssessment score(CompletionProvider& provider, const Mention& mention, const SelectorDecision& decision,
                           const EntityRecord& chosen, std::span<const Candidate> candidates, double tau,
                           int attempt = 1, const PromptLibrary& prompts = PromptLibrary::builtin());

/// Proposes reformulations of the mention conditioned on why the previous
/// link was rejected. An unparseable answer yields an empty proposal.
SynonymProposal generate_synonyms(CompletionProvider& provider, const Mention& mention,
                                  std::string_view failure_reason,
                                  const PromptLibrary& prompts = PromptLibrary::builtin());

/// Renders a double the way prompts and logs show it ("0.6", "1").
std::string format_number(double value);

}  // namespace ontolink
