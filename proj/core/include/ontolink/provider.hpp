#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ontolink {

enum class AgentRole { selector, scorer, synonym_generator, adjudicator };

std::string_view to_string(AgentRole role);
std::optional<AgentRole> parse_agent_role(std::string_view s);

/// One call to a completion backend. Remote providers send only the two
/// texts; `facts` carries the same content in structured form for offline
/// providers and for the run log.
struct CompletionRequest {
  AgentRole role = AgentRole::selector;
  std::string prompt_version;
  std::string system_text;
  std::string user_text;
  nlohmann::json facts;
};

/// (system_text, user_text) -> response_text. The response is returned
/// verbatim; transport failures surface as ProviderError.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;

  virtual std::string name() const = 0;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

}  // namespace ontolink
