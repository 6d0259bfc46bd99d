#include "ontolink/agents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

using Vars = std::map<std::string, std::string, std::less<>>;

// Index one past the '}' closing the object that opens at `open`, or npos.
std::size_t matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::string as_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

std::string context_block(const Mention& m) {
  if (!m.context || text::trim(*m.context).empty()) return {};
  return "Context: " + *m.context + "\n";
}

std::string feedback_block(const RetryFeedback* feedback) {
  if (feedback == nullptr) return {};
  std::string out = "\nA previous link for this entity was rejected: " + feedback->failure_reason + "\n";
  if (!feedback->reformulations.empty()) {
    out += "Alternative phrasings were also searched: " + text::join(feedback->reformulations, "; ") + "\n";
    out += "Judge candidates against the original user entity, not the alternative phrasings.\n";
  }
  return out;
}

std::string list_or_none(const std::vector<std::string>& items, std::string_view sep) {
  return items.empty() ? std::string("none") : text::join(items, sep);
}

std::string render_candidates(std::span<const Candidate> candidates) {
  std::ostringstream out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    out << '[' << (i + 1) << "] ID: " << c.curie << '\n';
    out << "    Label: " << c.label << '\n';
    if (c.matched_surface) out << "    Matched surface form: " << *c.matched_surface << '\n';
    out << "    Definition: " << c.definition_snippet << '\n';
    out << "    Synonyms: " << list_or_none(c.synonyms_shown, "; ") << '\n';
    if (!c.relations_shown.empty()) {
      out << "    Relations: ";
      for (std::size_t r = 0; r < c.relations_shown.size(); ++r) {
        if (r > 0) out << "; ";
        out << c.relations_shown[r].name << ": " << text::join(c.relations_shown[r].targets, ", ");
      }
      out << '\n';
    }
  }
  return out.str();
}

nlohmann::json candidate_facts(std::span<const Candidate> candidates) {
  auto out = nlohmann::json::array();
  for (const auto& c : candidates) {
    out.push_back({{"curie", c.curie}, {"label", c.label}, {"surface_forms", c.surface_forms}});
  }
  return out;
}

bool in_candidates(std::span<const Candidate> candidates, std::string_view curie) {
  return std::any_of(candidates.begin(), candidates.end(), [curie](const Candidate& c) { return c.curie == curie; });
}

std::optional<double> as_number(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = std::string(text::trim(v.get<std::string>()));
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::selector: return "selector";
    case AgentRole::scorer: return "scorer";
    case AgentRole::synonym_generator: return "synonym_generator";
    case AgentRole::adjudicator: return "adjudicator";
  }
  return "unknown";
}

std::optional<AgentRole> parse_agent_role(std::string_view s) {
  for (const auto role : {AgentRole::selector, AgentRole::scorer, AgentRole::synonym_generator, AgentRole::adjudicator}) {
    if (s == to_string(role)) return role;
  }
  if (s == "synonyms") return AgentRole::synonym_generator;
  return std::nullopt;
}

std::string format_number(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

nlohmann::json parse_agent_json(std::string_view response, std::initializer_list<std::string_view> expected_keys) {
  // Fence markers and prose contain no braces, so scanning for the first
  // balanced, parseable object handles both.
  std::optional<nlohmann::json> found;
  for (auto open = response.find('{'); open != std::string_view::npos; open = response.find('{', open + 1)) {
    const auto close = matching_brace(response, open);
    if (close == std::string_view::npos) continue;
    auto parsed = nlohmann::json::parse(response.substr(open, close - open), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      found = std::move(parsed);
      break;
    }
  }
  if (!found) throw MalformedResponse("no JSON object in response");
  for (const auto key : expected_keys) {
    if (!found->contains(std::string(key))) throw MissingKey(std::string(key));
  }
  return *found;
}

RenderedPrompt render_selector_prompt(const Mention& mention, std::span<const Candidate> candidates,
                                      const RetryFeedback* feedback, const PromptLibrary& prompts) {
  if (candidates.empty()) throw EmptyCandidates();
  return render(prompts.selector, Vars{
                                      {"mention", mention.text},
                                      {"context_block", context_block(mention)},
                                      {"feedback_block", feedback_block(feedback)},
                                      {"candidates", render_candidates(candidates)},
                                  });
}

SelectorDecision select(CompletionProvider& provider, const Mention& mention, std::span<const Candidate> candidates,
                        const RetryFeedback* feedback, const PromptLibrary& prompts) {
  auto rendered = render_selector_prompt(mention, candidates, feedback, prompts);

  CompletionRequest req;
  req.role = AgentRole::selector;
  req.prompt_version = prompts.selector.version;
  req.system_text = std::move(rendered.system);
  req.user_text = std::move(rendered.user);
  auto queries = nlohmann::json::array({mention.text});
  if (feedback != nullptr) {
    for (const auto& r : feedback->reformulations) queries.push_back(r);
  }
  req.facts = {{"mention", mention.text},
               {"attempt", feedback == nullptr ? 1 : 2},
               {"queries", std::move(queries)},
               {"candidates", candidate_facts(candidates)}};
  if (feedback != nullptr) req.facts["failure_reason"] = feedback->failure_reason;

  const std::string response = provider.complete(req);

  nlohmann::json j;
  try {
    j = parse_agent_json(response, {"chosen_id", "explanation"});
  } catch (const MalformedResponse& e) {
    return {std::nullopt, std::string("unparseable selection (") + e.what() + ")"};
  }

  SelectorDecision d;
  d.explanation = as_text(j.at("explanation"));
  const auto& raw = j.at("chosen_id");
  std::string chosen = raw.is_number() ? format_number(raw.get<double>()) : as_text(raw);
  chosen = std::string(text::trim(chosen));
  if (chosen.empty() || chosen == kAbstainId) return d;
  if (!in_candidates(candidates, chosen)) {
    d.explanation = "selector chose " + chosen +
                    ", which is not among the retrieved candidates; treated as abstention. Original explanation: " +
                    d.explanation;
    return d;
  }
  d.chosen_id = std::move(chosen);
  return d;
}

ConfidenceAssessment score(CompletionProvider& provider, const Mention& mention, const SelectorDecision& decision,
                           const EntityRecord& chosen, std::span<const Candidate> candidates, double tau,
                           int attempt, const PromptLibrary& prompts) {
  if (decision.abstained()) throw std::invalid_argument("cannot score an abstention");

  std::ostringstream others;
  for (const auto& c : candidates) {
    if (c.curie != chosen.curie) others << "- " << c.curie << ": " << c.label << '\n';
  }
  const std::string others_text = others.str().empty() ? std::string("none\n") : others.str();
  auto rendered = render(prompts.scorer, Vars{
                                             {"mention", mention.text},
                                             {"context_block", context_block(mention)},
                                             {"chosen_id", chosen.curie},
                                             {"chosen_label", chosen.label},
                                             {"chosen_definition", chosen.definition},
                                             {"chosen_synonyms", list_or_none(chosen.synonyms, "; ")},
                                             {"selector_rationale", decision.explanation},
                                             {"candidates", others_text},
                                             {"tau", format_number(tau)},
                                         });

  CompletionRequest req;
  req.role = AgentRole::scorer;
  req.prompt_version = prompts.scorer.version;
  req.system_text = std::move(rendered.system);
  req.user_text = std::move(rendered.user);
  auto candidate_ids = nlohmann::json::array();
  for (const auto& c : candidates) candidate_ids.push_back(c.curie);
  req.facts = {{"mention", mention.text},
               {"attempt", attempt},
               {"tau", tau},
               {"chosen", {{"curie", chosen.curie}, {"label", chosen.label}, {"synonyms", chosen.synonyms}}},
               {"candidates", std::move(candidate_ids)}};

  const std::string response = provider.complete(req);

  nlohmann::json j;
  try {
    j = parse_agent_json(response, {"score", "explanation"});
  } catch (const MalformedResponse&) {
    return {0.0, "unparseable assessment", {}};
  }
  const auto value = as_number(j.at("score"));
  if (!value) return {0.0, "unparseable assessment", {}};

  ConfidenceAssessment a;
  a.score = std::isnan(*value) ? 0.0 : std::clamp(*value, 0.0, 1.0);
  a.explanation = as_text(j.at("explanation"));

  if (a.score < tau && j.contains("alternatives") && j.at("alternatives").is_array()) {
    for (const auto& item : j.at("alternatives")) {
      Alternative alt;
      if (item.is_string()) {
        alt.curie = item.get<std::string>();
      } else if (item.is_object()) {
        for (const char* key : {"curie", "id", "chosen_id"}) {
          if (item.contains(key) && item.at(key).is_string()) {
            alt.curie = item.at(key).get<std::string>();
            break;
          }
        }
        for (const char* key : {"reason", "explanation"}) {
          if (item.contains(key)) {
            alt.reason = as_text(item.at(key));
            break;
          }
        }
      }
      alt.curie = std::string(text::trim(alt.curie));
      if (alt.curie.empty() || alt.curie == chosen.curie || !in_candidates(candidates, alt.curie)) continue;
      const bool dup = std::any_of(a.alternatives.begin(), a.alternatives.end(),
                                   [&alt](const Alternative& x) { return x.curie == alt.curie; });
      if (!dup) a.alternatives.push_back(std::move(alt));
      if (a.alternatives.size() == kMaxAlternatives) break;
    }
  }
  return a;
}

SynonymProposal generate_synonyms(CompletionProvider& provider, const Mention& mention,
                                  std::string_view failure_reason, const PromptLibrary& prompts) {
  if (text::trim(failure_reason).empty()) throw std::invalid_argument("failure_reason must not be empty");

  SynonymProposal proposal;
  proposal.failure_reason = std::string(failure_reason);

  auto rendered = render(prompts.synonyms, Vars{
                                               {"mention", mention.text},
                                               {"context_block", context_block(mention)},
                                               {"failure_reason", proposal.failure_reason},
                                           });
  CompletionRequest req;
  req.role = AgentRole::synonym_generator;
  req.prompt_version = prompts.synonyms.version;
  req.system_text = std::move(rendered.system);
  req.user_text = std::move(rendered.user);
  req.facts = {{"mention", mention.text}, {"failure_reason", proposal.failure_reason}};

  const std::string response = provider.complete(req);

  nlohmann::json j;
  try {
    j = parse_agent_json(response, {"synonyms"});
  } catch (const MalformedResponse&) {
    return proposal;
  }
  const auto& list = j.at("synonyms");
  if (!list.is_array()) return proposal;

  std::unordered_set<std::string> seen{text::to_lower(text::trim(mention.text))};
  for (const auto& item : list) {
    if (!item.is_string()) continue;
    auto s = std::string(text::trim(item.get<std::string>()));
    if (s.empty() || !seen.insert(text::to_lower(s)).second) continue;
    proposal.synonyms.push_back(std::move(s));
    if (proposal.synonyms.size() == kMaxSynonyms) break;
  }
  return proposal;
}

}  // namespace ontolink
