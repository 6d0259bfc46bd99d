#include "ontolink/mock_provider.hpp"

#include <algorithm>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

std::string fact_string(const nlohmann::json& facts, const char* key) {
  if (facts.is_object() && facts.contains(key) && facts.at(key).is_string()) return facts.at(key).get<std::string>();
  return {};
}

int fact_attempt(const nlohmann::json& facts) {
  if (facts.is_object() && facts.contains("attempt") && facts.at("attempt").is_number_integer()) {
    return facts.at("attempt").get<int>();
  }
  return 1;
}

std::string key_mention(const CompletionRequest& r) {
  return r.role == AgentRole::adjudicator ? fact_string(r.facts, "query") : fact_string(r.facts, "mention");
}

bool surface_equals(const nlohmann::json& surfaces, std::string_view needle) {
  if (!surfaces.is_array()) return false;
  return std::any_of(surfaces.begin(), surfaces.end(), [needle](const nlohmann::json& s) {
    return s.is_string() && text::iequals(text::trim(s.get<std::string>()), text::trim(needle));
  });
}

}  // namespace

MockFixture MockFixture::from_json(const nlohmann::json& j) {
  try {
    MockFixture f;
    if (j.contains("synonyms")) {
      for (const auto& [mention, list] : j.at("synonyms").items()) {
        f.synonyms[text::to_lower(text::trim(mention))] = list.get<std::vector<std::string>>();
      }
    }
    if (j.contains("scripts")) {
      for (const auto& s : j.at("scripts")) {
        ScriptedReply r;
        const auto role = parse_agent_role(s.at("role").get<std::string>());
        if (!role) throw ConfigError("mock fixture: unknown role " + s.at("role").dump());
        r.role = *role;
        r.mention = s.at("mention").get<std::string>();
        r.attempt = s.value("attempt", 0);
        if (s.contains("error")) {
          r.error = s.at("error").get<std::string>();
        } else if (s.contains("response_json")) {
          r.response = s.at("response_json").dump();
        } else {
          r.response = s.at("response").get<std::string>();
        }
        f.scripts.push_back(std::move(r));
      }
    }
    if (j.contains("adjudications")) {
      for (const auto& a : j.at("adjudications")) {
        f.adjudications[{text::to_lower(text::trim(a.at("query").get<std::string>())), a.at("chosen").get<std::string>()}] =
            {a.at("selected_gold").get<std::string>(), a.at("label").get<std::string>()};
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mock fixture: ") + e.what());
  }
}

MockProvider::MockProvider(MockFixture fixture) : fixture_(std::move(fixture)) {}

void MockProvider::script(AgentRole role, std::string mention, std::string response, int attempt) {
  std::lock_guard lock(mutex_);
  fixture_.scripts.push_back({role, std::move(mention), attempt, std::move(response), std::nullopt});
}

void MockProvider::fail(AgentRole role, std::string mention, std::string message, int attempt) {
  std::lock_guard lock(mutex_);
  fixture_.scripts.push_back({role, std::move(mention), attempt, {}, std::move(message)});
}

void MockProvider::set_synonyms(const std::string& mention, std::vector<std::string> synonyms) {
  std::lock_guard lock(mutex_);
  fixture_.synonyms[text::to_lower(text::trim(mention))] = std::move(synonyms);
}

void MockProvider::set_adjudication(const std::string& query, const std::string& chosen, MockAdjudication verdict) {
  std::lock_guard lock(mutex_);
  fixture_.adjudications[{text::to_lower(text::trim(query)), chosen}] = std::move(verdict);
}

std::vector<MockProvider::Call> MockProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockProvider::call_count(AgentRole role) const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(
      std::count_if(calls_.begin(), calls_.end(), [role](const Call& c) { return c.role == role; }));
}

void MockProvider::clear_calls() {
  std::lock_guard lock(mutex_);
  calls_.clear();
}

std::string MockProvider::complete(const CompletionRequest& request) {
  const std::string mention = key_mention(request);
  const int attempt = fact_attempt(request.facts);
  std::optional<ScriptedReply> scripted;
  {
    std::lock_guard lock(mutex_);
    calls_.push_back({request.role, mention, attempt});
    // The most recently added matching script wins.
    for (auto it = fixture_.scripts.rbegin(); it != fixture_.scripts.rend(); ++it) {
      if (it->role == request.role && text::iequals(text::trim(it->mention), text::trim(mention)) &&
          (it->attempt == 0 || it->attempt == attempt)) {
        scripted = *it;
        break;
      }
    }
  }
  if (scripted) {
    if (scripted->error) throw ProviderError(*scripted->error);
    return scripted->response;
  }
  std::lock_guard lock(mutex_);
  return rule_reply(request);
}

std::string MockProvider::rule_reply(const CompletionRequest& request) const {
  const auto& facts = request.facts;
  switch (request.role) {
    case AgentRole::selector: {
      const auto& candidates = facts.at("candidates");
      if (candidates.empty()) return R"({"chosen_id": "-1", "explanation": "No candidates."})";
      for (const auto& q : facts.at("queries")) {
        const auto query = q.get<std::string>();
        for (const auto& c : candidates) {
          if (surface_equals(c.at("surface_forms"), query)) {
            return nlohmann::json{{"chosen_id", c.at("curie")},
                                  {"explanation", "Exact case-insensitive match of '" + query +
                                                      "' to a label or synonym of " +
                                                      c.at("curie").get<std::string>() + "."}}
                .dump();
          }
        }
      }
      return nlohmann::json{{"chosen_id", candidates.at(0).at("curie")},
                            {"explanation", "No exact surface match; taking the top-ranked candidate."}}
          .dump();
    }
    case AgentRole::scorer: {
      const auto& chosen = facts.at("chosen");
      const auto mention = fact_string(facts, "mention");
      const bool exact = text::iequals(text::trim(chosen.at("label").get<std::string>()), text::trim(mention)) ||
                         surface_equals(chosen.at("synonyms"), mention);
      if (exact) {
        return nlohmann::json{{"score", 1.0},
                              {"explanation", "Exact Match. The mention equals the chosen term's label or synonym."}}
            .dump();
      }
      auto alternatives = nlohmann::json::array();
      for (const auto& c : facts.at("candidates")) {
        if (c != chosen.at("curie") && alternatives.size() < 3) alternatives.push_back(c);
      }
      return nlohmann::json{{"score", 0.2}, {"explanation", kLowConfidenceRationale}, {"alternatives", alternatives}}
          .dump();
    }
    case AgentRole::synonym_generator: {
      const auto it = fixture_.synonyms.find(text::to_lower(text::trim(fact_string(facts, "mention"))));
      const auto list = it == fixture_.synonyms.end() ? std::vector<std::string>{} : it->second;
      return nlohmann::json{{"synonyms", list}}.dump();
    }
    case AgentRole::adjudicator: {
      const auto query = text::to_lower(text::trim(fact_string(facts, "query")));
      const auto chosen = facts.at("chosen").at("curie").get<std::string>();
      const auto it = fixture_.adjudications.find({query, chosen});
      if (it != fixture_.adjudications.end()) {
        return nlohmann::json{{"selected_gold", it->second.selected_gold},
                              {"label", it->second.label},
                              {"explanation", "Fixture verdict."}}
            .dump();
      }
      return nlohmann::json{{"selected_gold", facts.at("gold").at(0)},
                            {"label", "Other"},
                            {"explanation", "No fixture verdict for this case."}}
          .dump();
    }
  }
  throw ProviderError("mock provider: unknown agent role");
}

}  // namespace ontolink
