#include "ontolink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

struct Pass {
  std::vector<Candidate> candidates;
  SelectorDecision decision;
  ConfidenceAssessment assessment;  // score 0 when the selector abstained
};

Pass run_pass(const Mention& mention, std::vector<Candidate> candidates, CompletionProvider& provider,
              const RetrievalIndexes& indexes, const PipelineConfig& config, const RetryFeedback* feedback,
              const PromptLibrary& prompts) {
  Pass p;
  p.candidates = std::move(candidates);
  if (p.candidates.empty()) {
    p.decision.explanation = "no candidates retrieved";
    p.assessment.explanation = "nothing to score";
    return p;
  }
  p.decision = select(provider, mention, p.candidates, feedback, prompts);
  if (p.decision.abstained()) {
    p.assessment.explanation = "selector abstained";
    return p;
  }
  const auto& chosen = indexes.records.at(*p.decision.chosen_id);
  p.assessment = score(provider, mention, p.decision, chosen, p.candidates, config.tau, feedback == nullptr ? 1 : 2,
                       prompts);
  return p;
}

std::string failure_reason(const Pass& p) {
  std::string reason = p.decision.abstained() ? p.decision.explanation : p.assessment.explanation;
  if (text::trim(reason).empty()) reason = "confidence below threshold";
  return reason;
}

void fill_from_pass(LinkResult& r, const Pass& p, const RecordStore& records) {
  r.final_id = p.decision.chosen_id;
  r.label = r.final_id ? std::optional<std::string>(records.at(*r.final_id).label) : std::nullopt;
  r.selector_rationale = p.decision.explanation;
  r.scorer_rationale = p.assessment.explanation;
  r.confidence = p.assessment.score;
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

std::optional<std::string> id_from_wire(const nlohmann::json& v) {
  auto s = v.get<std::string>();
  if (s == kAbstainId) return std::nullopt;
  return s;
}

nlohmann::json id_to_wire(const std::optional<std::string>& id) { return id ? *id : std::string(kAbstainId); }

/// Records every call made through it for one mention.
class LoggingProvider final : public CompletionProvider {
 public:
  LoggingProvider(CompletionProvider& inner, std::size_t index, std::vector<RunLogEntry>& sink)
      : inner_(inner), index_(index), sink_(sink) {}

  std::string name() const override { return inner_.name(); }

  std::string complete(const CompletionRequest& request) override {
    RunLogEntry e;
    e.mention_index = index_;
    e.role = std::string(to_string(request.role));
    e.prompt_version = request.prompt_version;
    e.system_text = request.system_text;
    e.user_text = request.user_text;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.response = inner_.complete(request);
    } catch (const std::exception& ex) {
      e.error = ex.what();
      e.elapsed_ms = elapsed(start);
      sink_.push_back(std::move(e));
      throw;
    }
    e.elapsed_ms = elapsed(start);
    sink_.push_back(e);
    return e.response;
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  CompletionProvider& inner_;
  std::size_t index_;
  std::vector<RunLogEntry>& sink_;
};

}  // namespace

void PipelineConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (max_hops < 0) throw ConfigError("max_hops must be >= 0");
  if (max_hops > 1) throw ConfigError("only a single synonym hop is supported (max_hops <= 1)");
  retrieval.validate();
}

LinkResult link(const Mention& mention, const RetrievalIndexes& indexes, CompletionProvider& provider,
                const PipelineConfig& config, const PromptLibrary& prompts) {
  mention.validate();
  LinkResult r;
  r.mention = mention.text;
  try {
    Pass first = run_pass(mention, retrieve(mention, indexes, config.retrieval), provider, indexes, config, nullptr,
                          prompts);
    r.first_id = first.decision.chosen_id;
    fill_from_pass(r, first, indexes.records);

    const bool accepted = first.assessment.score >= config.tau;
    const bool nothing_retrieved = first.candidates.empty();
    if (accepted || nothing_retrieved || config.max_hops < 1) {
      if (!accepted) {
        r.rejection = Rejection{failure_reason(first), {}, {}};
        for (const auto& alt : first.assessment.alternatives) {
          r.rejection->alternatives.push_back({alt.curie, indexes.records.at(alt.curie).label, alt.reason});
        }
      }
      return r;
    }

    RetryFeedback feedback;
    feedback.failure_reason = failure_reason(first);
    const auto proposal = generate_synonyms(provider, mention, feedback.failure_reason, prompts);
    feedback.reformulations = proposal.synonyms;

    std::vector<std::vector<Candidate>> lists{first.candidates};
    for (const auto& reformulation : proposal.synonyms) {
      lists.push_back(retrieve(Mention{reformulation, mention.context}, indexes, config.retrieval));
    }
    auto fused = order_candidates(interleave(lists), mention.text, config.retrieval.k_tot);
    Pass second = run_pass(mention, std::move(fused), provider, indexes, config, &feedback, prompts);

    r.hops = 2;
    r.used_synonyms = !proposal.synonyms.empty();
    const Pass& best = second.assessment.score >= first.assessment.score ? second : first;
    fill_from_pass(r, best, indexes.records);
    if (best.assessment.score < config.tau) {
      Rejection rej;
      rej.rationale = failure_reason(best);
      rej.synonym_proposals = proposal.synonyms;
      for (const auto& alt : best.assessment.alternatives) {
        rej.alternatives.push_back({alt.curie, indexes.records.at(alt.curie).label, alt.reason});
      }
      r.rejection = std::move(rej);
    }
    return r;
  } catch (const ProviderError& e) {
    LinkResult failed;
    failed.mention = mention.text;
    failed.first_id = r.first_id;
    failed.hops = r.hops;
    failed.selector_rationale = r.selector_rationale;
    failed.scorer_rationale = r.scorer_rationale;
    failed.error = e.what();
    return failed;
  }
}

nlohmann::ordered_json result_to_json(const LinkResult& r) {
  nlohmann::ordered_json j;
  j["mention"] = r.mention;
  j["final_id"] = id_to_wire(r.final_id);
  j["label"] = r.label ? nlohmann::ordered_json(*r.label) : nlohmann::ordered_json(nullptr);
  j["selector_rationale"] = r.selector_rationale;
  j["scorer_rationale"] = r.scorer_rationale;
  j["confidence"] = r.confidence;
  j["hops"] = r.hops;
  j["used_synonyms"] = r.used_synonyms;
  j["first_id"] = id_to_wire(r.first_id);
  if (r.rejection) {
    j["rejection_rationale"] = r.rejection->rationale;
    j["synonym_proposals"] = r.rejection->synonym_proposals;
    auto alts = nlohmann::ordered_json::array();
    for (const auto& a : r.rejection->alternatives) {
      nlohmann::ordered_json o;
      o["curie"] = a.curie;
      o["label"] = a.label;
      o["explanation"] = a.explanation;
      alts.push_back(std::move(o));
    }
    j["alternatives"] = std::move(alts);
  }
  if (r.error) j["error"] = *r.error;
  return j;
}

std::string serialize_result(const LinkResult& result) { return result_to_json(result).dump(); }

LinkResult result_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {
      "mention",  "final_id", "label",   "selector_rationale",  "scorer_rationale",  "confidence",   "hops",
      "used_synonyms", "first_id", "rejection_rationale", "synonym_proposals", "alternatives", "error"};
  if (!j.is_object()) throw SchemaError("result must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw SchemaError("unknown result key: " + key);
  }
  try {
    LinkResult r;
    r.mention = j.at("mention").get<std::string>();
    r.final_id = id_from_wire(j.at("final_id"));
    r.label = opt_string(j, "label");
    r.selector_rationale = j.at("selector_rationale").get<std::string>();
    r.scorer_rationale = j.at("scorer_rationale").get<std::string>();
    r.confidence = j.at("confidence").get<double>();
    r.hops = j.at("hops").get<int>();
    r.used_synonyms = j.at("used_synonyms").get<bool>();
    r.first_id = j.contains("first_id") ? id_from_wire(j.at("first_id")) : r.final_id;
    const int rejection_keys = static_cast<int>(j.contains("rejection_rationale")) +
                               static_cast<int>(j.contains("synonym_proposals")) +
                               static_cast<int>(j.contains("alternatives"));
    if (rejection_keys != 0 && rejection_keys != 3) throw SchemaError("rejection keys must appear together");
    if (rejection_keys == 3) {
      Rejection rej;
      rej.rationale = j.at("rejection_rationale").get<std::string>();
      rej.synonym_proposals = j.at("synonym_proposals").get<std::vector<std::string>>();
      for (const auto& a : j.at("alternatives")) {
        rej.alternatives.push_back({a.at("curie").get<std::string>(), a.at("label").get<std::string>(),
                                    a.at("explanation").get<std::string>()});
      }
      r.rejection = std::move(rej);
    }
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) throw SchemaError("confidence outside [0, 1]");
    if (r.hops < 1) throw SchemaError("hops must be >= 1");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed result: ") + e.what());
  }
}

LinkResult parse_result(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw SchemaError("result line is not valid JSON");
  return result_from_json(j);
}

std::vector<LinkResult> load_results(std::istream& in) {
  std::vector<LinkResult> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse_result(line));
    } catch (const SchemaError& e) {
      throw SchemaError("results line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::ordered_json log_entry_to_json(const RunLogEntry& e) {
  nlohmann::ordered_json j;
  j["mention_index"] = e.mention_index;
  j["role"] = e.role;
  j["prompt_version"] = e.prompt_version;
  j["system"] = e.system_text;
  j["user"] = e.user_text;
  j["response"] = e.response;
  if (!e.error.empty()) j["error"] = e.error;
  j["elapsed_ms"] = e.elapsed_ms;
  return j;
}

std::vector<LinkResult> link_batch(std::span<const Mention> mentions, const RetrievalIndexes& indexes,
                                   CompletionProvider& provider, const PipelineConfig& config, std::size_t jobs,
                                   const PromptLibrary& prompts, std::vector<RunLogEntry>* log) {
  config.validate();
  std::vector<LinkResult> results(mentions.size());
  std::vector<std::vector<RunLogEntry>> logs(mentions.size());

  auto run_one = [&](std::size_t i) {
    LoggingProvider logged(provider, i, logs[i]);
    CompletionProvider& p = log != nullptr ? static_cast<CompletionProvider&>(logged) : provider;
    try {
      results[i] = link(mentions[i], indexes, p, config, prompts);
    } catch (const std::exception& e) {
      results[i].mention = mentions[i].text;
      results[i].error = e.what();
    }
  };

  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(mentions.size(), 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < mentions.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < mentions.size(); i = next++) run_one(i);
      });
    }
  }

  if (log != nullptr) {
    for (auto& entries : logs) {
      for (auto& e : entries) log->push_back(std::move(e));
    }
  }
  return results;
}

std::vector<Mention> load_mentions(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("mentions file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("mentions file must hold a JSON array");
  std::vector<Mention> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("mention") || !item.at("mention").is_string()) {
      throw SchemaError("each mention needs a string \"mention\" field");
    }
    Mention m{item.at("mention").get<std::string>(), std::nullopt};
    if (item.contains("context") && !item.at("context").is_null()) {
      if (!item.at("context").is_string()) throw SchemaError("\"context\" must be a string");
      m.context = item.at("context").get<std::string>();
    }
    if (text::trim(m.text).empty()) throw SchemaError("blank mention");
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ontolink
