#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/provider.hpp"

namespace ontolink {

/// A canned reply for (role, mention, attempt). attempt 0 matches any attempt.
/// When `error` is set the call throws ProviderError instead.
struct ScriptedReply {
  AgentRole role = AgentRole::selector;
  std::string mention;
  int attempt = 0;
  std::string response;
  std::optional<std::string> error;
};

struct MockAdjudication {
  std::string selected_gold;
  std::string label;
};

/// Test fixture driving MockProvider. JSON form:
///   {"synonyms": {"<mention>": ["..."]},
///    "scripts": [{"role": "scorer", "mention": "...", "attempt": 1,
///                 "response": "<text>" | "response_json": {...} | "error": "..."}],
///    "adjudications": [{"query", "chosen", "selected_gold", "label"}]}
struct MockFixture {
  std::map<std::string, std::vector<std::string>> synonyms;  // keyed by lowercased mention
  std::vector<ScriptedReply> scripts;
  std::map<std::pair<std::string, std::string>, MockAdjudication> adjudications;  // (lowercased query, chosen)

  static MockFixture from_json(const nlohmann::json& j);
};

/// Deterministic offline provider. Without a script it answers by rule:
///  - selector: the first candidate whose label or a synonym equals the
///    mention (then each reformulation) case-insensitively, else the first
///    candidate;
///  - scorer: 1.0 when the mention equals the chosen label or a synonym,
///    otherwise 0.2 with a fixed rationale and up to three other candidates;
///  - synonym generator: fixture table lookup;
///  - adjudicator: fixture table keyed by (query, chosen CURIE), else Other.
/// Replies depend only on the request, so concurrent and repeated calls are
/// consistent. Every call is recorded.
class MockProvider final : public CompletionProvider {
 public:
  struct Call {
    AgentRole role;
    std::string mention;
    int attempt;
  };

  explicit MockProvider(MockFixture fixture = {});

  std::string name() const override { return "mock"; }
  std::string complete(const CompletionRequest& request) override;

  void script(AgentRole role, std::string mention, std::string response, int attempt = 0);
  void fail(AgentRole role, std::string mention, std::string message = "scripted provider failure", int attempt = 0);
  void set_synonyms(const std::string& mention, std::vector<std::string> synonyms);
  void set_adjudication(const std::string& query, const std::string& chosen, MockAdjudication verdict);

  std::vector<Call> calls() const;
  std::size_t call_count(AgentRole role) const;
  void clear_calls();

  static inline const std::string kLowConfidenceRationale =
      "Mock assessment: the mention does not equal the chosen term's label or any of its synonyms.";

 private:
  std::string rule_reply(const CompletionRequest& request) const;

  mutable std::mutex mutex_;
  MockFixture fixture_;
  std::vector<Call> calls_;
};

}  // namespace ontolink
