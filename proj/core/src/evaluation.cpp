#include "ontolink/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ontolink/agents.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

bool hit(const std::optional<std::string>& y, const std::vector<std::string>& targets) {
  return y && std::find(targets.begin(), targets.end(), *y) != targets.end();
}

bool looks_like_curie(std::string_view s) {
  const auto colon = s.find(':');
  return colon != std::string_view::npos && colon > 0 && colon + 1 < s.size() &&
         s.find_first_of(" \t\r\n") == std::string_view::npos;
}

std::string describe(const EntityRecord& r) {
  std::ostringstream out;
  out << "- ID: " << r.curie << "\n  Label: " << r.label << "\n  Definition: " << r.definition
      << "\n  Synonyms: " << (r.synonyms.empty() ? std::string("none") : text::join(r.synonyms, "; ")) << '\n';
  return out.str();
}

nlohmann::ordered_json side_json(const LinkResult& r, const RecordStore& records) {
  nlohmann::ordered_json side;
  if (!r.final_id) {
    side["curie"] = std::string(kAbstainId);
    side["label"] = nullptr;
    side["definition"] = nullptr;
    side["synonyms"] = nlohmann::ordered_json::array();
    side["purl"] = nullptr;
    return side;
  }
  side["curie"] = *r.final_id;
  if (const auto* rec = records.find(*r.final_id)) {
    side["label"] = rec->label;
    side["definition"] = rec->definition;
    side["synonyms"] = rec->synonyms;
  } else {
    side["label"] = r.label ? nlohmann::ordered_json(*r.label) : nlohmann::ordered_json(nullptr);
    side["definition"] = nullptr;
    side["synonyms"] = nlohmann::ordered_json::array();
  }
  side["purl"] = obo_purl(*r.final_id);
  return side;
}

}  // namespace

RunRecord RunRecord::from(const LinkResult& r) {
  RunRecord rec;
  rec.mention = r.mention;
  rec.y_first = r.first_id;
  rec.y_final = r.error ? std::nullopt : r.final_id;
  rec.hops = r.hops;
  rec.used_synonyms = r.used_synonyms;
  return rec;
}

EvalReport compute_metrics(std::span<const RunRecord> records, std::span<const GoldAnnotation> gold) {
  if (records.empty()) throw EmptyRun();
  std::unordered_map<std::string, const GoldAnnotation*> by_mention;
  for (const auto& g : gold) {
    if (!by_mention.emplace(g.mention, &g).second) throw SchemaError("duplicate gold mention: " + g.mention);
  }
  std::size_t overall = 0, first = 0, final = 0, retries = 0, synonyms = 0;
  for (const auto& r : records) {
    const auto it = by_mention.find(r.mention);
    if (it == by_mention.end()) throw MissingGold(r.mention);
    const auto& targets = it->second->targets;
    const bool f = hit(r.y_first, targets);
    const bool l = hit(r.y_final, targets);
    overall += (f || l) ? 1 : 0;
    first += f ? 1 : 0;
    final += l ? 1 : 0;
    retries += r.hops > 1 ? 1 : 0;
    synonyms += r.used_synonyms ? 1 : 0;
  }
  const auto m = static_cast<double>(records.size());
  return {records.size(),
          static_cast<double>(overall) / m,
          static_cast<double>(first) / m,
          static_cast<double>(final) / m,
          static_cast<double>(retries) / m,
          static_cast<double>(synonyms) / m};
}

nlohmann::ordered_json report_to_json(const EvalReport& report, std::optional<double> tau) {
  nlohmann::ordered_json j;
  j["M"] = report.m;
  if (tau) j["tau"] = *tau;
  j["acc1_overall"] = report.acc1_overall;
  j["acc1_first"] = report.acc1_first;
  j["acc1_final"] = report.acc1_final;
  j["retry_rate"] = report.retry_rate;
  j["synonym_rate"] = report.synonym_rate;
  return j;
}

std::vector<GoldAnnotation> load_gold(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("gold file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("gold file must hold a JSON array");
  std::vector<GoldAnnotation> out;
  for (const auto& item : j) {
    try {
      GoldAnnotation g{item.at("mention").get<std::string>(), item.at("targets").get<std::vector<std::string>>()};
      if (g.targets.empty()) throw SchemaError("gold entry without targets: " + g.mention);
      for (const auto& t : g.targets) {
        if (!looks_like_curie(t)) throw SchemaError("invalid gold CURIE: " + t);
      }
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("malformed gold entry: ") + e.what());
    }
  }
  return out;
}

std::string_view to_string(DriftLabel label) {
  switch (label) {
    case DriftLabel::Exact_Match: return "Exact_Match";
    case DriftLabel::Class_vs_Taxon: return "Class_vs_Taxon";
    case DriftLabel::Hierarchy_Drift: return "Hierarchy_Drift";
    case DriftLabel::Synonym_or_Lexical: return "Synonym_or_Lexical";
    case DriftLabel::Cross_Ontology_Equivalent: return "Cross_Ontology_Equivalent";
    case DriftLabel::Dataset_Annotation_Error: return "Dataset_Annotation_Error";
    case DriftLabel::Model_Incorrect: return "Model_Incorrect";
    case DriftLabel::Other: return "Other";
  }
  return "Other";
}

std::optional<DriftLabel> parse_drift_label(std::string_view s) {
  for (const auto l : kAllDriftLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

AdjudicationLabel adjudicate(CompletionProvider& provider, std::string_view query, const EntityRecord& chosen,
                             std::span<const EntityRecord> gold_records, const PromptLibrary& prompts) {
  if (gold_records.empty()) throw std::invalid_argument("adjudication needs at least one gold record");
  for (const auto& g : gold_records) {
    if (g.curie == chosen.curie) return {DriftLabel::Exact_Match, g.curie, "identical identifiers"};
  }

  std::string gold_text;
  auto gold_ids = nlohmann::json::array();
  for (const auto& g : gold_records) {
    gold_text += describe(g);
    gold_ids.push_back(g.curie);
  }
  auto rendered = render(prompts.adjudicator, {{"query", std::string(query)},
                                               {"chosen", describe(chosen)},
                                               {"gold", gold_text}});
  CompletionRequest req;
  req.role = AgentRole::adjudicator;
  req.prompt_version = prompts.adjudicator.version;
  req.system_text = std::move(rendered.system);
  req.user_text = std::move(rendered.user);
  req.facts = {{"query", std::string(query)},
               {"chosen", {{"curie", chosen.curie}, {"label", chosen.label}}},
               {"gold", gold_ids}};

  const std::string response = provider.complete(req);
  const std::string fallback_gold = gold_records.front().curie;

  nlohmann::json j;
  try {
    j = parse_agent_json(response, {"selected_gold", "label"});
  } catch (const MalformedResponse& e) {
    return {DriftLabel::Other, fallback_gold, std::string("unparseable verdict: ") + e.what()};
  }
  const auto& raw_label = j.at("label");
  const auto& raw_gold = j.at("selected_gold");
  const std::string label_text = raw_label.is_string() ? raw_label.get<std::string>() : raw_label.dump();
  const std::string gold_text_id = raw_gold.is_string() ? raw_gold.get<std::string>() : raw_gold.dump();

  const bool gold_ok = std::any_of(gold_records.begin(), gold_records.end(),
                                   [&](const EntityRecord& g) { return g.curie == gold_text_id; });
  if (!gold_ok) {
    return {DriftLabel::Other, fallback_gold, "selected_gold " + gold_text_id + " is not in the gold set"};
  }
  const auto label = parse_drift_label(text::trim(label_text));
  if (!label) return {DriftLabel::Other, gold_text_id, "label " + label_text + " is outside the taxonomy"};
  return {*label, gold_text_id, j.contains("explanation") && j.at("explanation").is_string()
                                    ? j.at("explanation").get<std::string>()
                                    : std::string()};
}

std::vector<AdjudicationCase> find_mismatches(std::span<const LinkResult> results,
                                              std::span<const GoldAnnotation> gold) {
  std::unordered_map<std::string, const GoldAnnotation*> by_mention;
  for (const auto& g : gold) by_mention.emplace(g.mention, &g);
  std::vector<AdjudicationCase> out;
  for (const auto& r : results) {
    const auto it = by_mention.find(r.mention);
    if (it == by_mention.end()) throw MissingGold(r.mention);
    if (r.error || !r.final_id || hit(r.final_id, it->second->targets)) continue;
    out.push_back({r.mention, *r.final_id, it->second->targets});
  }
  return out;
}

nlohmann::ordered_json case_to_json(const AdjudicationCase& c) {
  nlohmann::ordered_json j;
  j["query"] = c.query;
  j["chosen"] = c.chosen;
  j["gold"] = c.gold;
  return j;
}

std::vector<AdjudicationCase> load_cases(std::istream& in) {
  std::vector<AdjudicationCase> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AdjudicationCase c{j.at("query").get<std::string>(), j.at("chosen").get<std::string>(),
                         j.at("gold").get<std::vector<std::string>>()};
      if (c.gold.empty()) throw SchemaError("case without gold targets");
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("mismatches line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::ordered_json adjudication_to_json(const AdjudicationCase& c, const AdjudicationLabel& label) {
  nlohmann::ordered_json j;
  j["query"] = c.query;
  j["chosen"] = c.chosen;
  j["selected_gold"] = label.selected_gold;
  j["label"] = std::string(to_string(label.label));
  return j;
}

double percent_one_decimal(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  // tenths of a percent, half-up: floor(count * 1000 / total + 1/2)
  const unsigned long long tenths = (2ULL * count * 1000ULL + total) / (2ULL * total);
  return static_cast<double>(tenths) / 10.0;
}

std::vector<LabelShare> label_distribution(std::span<const DriftLabel> labels) {
  std::map<DriftLabel, std::size_t> counts;
  for (const auto l : labels) ++counts[l];
  std::vector<LabelShare> out;
  for (const auto l : kAllDriftLabels) {
    const auto it = counts.find(l);
    if (it == counts.end()) continue;
    out.push_back({l, it->second, percent_one_decimal(it->second, labels.size())});
  }
  return out;
}

std::vector<LabelShare> label_distribution(std::span<const AdjudicationLabel> labels) {
  std::vector<DriftLabel> raw;
  raw.reserve(labels.size());
  for (const auto& l : labels) raw.push_back(l.label);
  return label_distribution(std::span<const DriftLabel>(raw));
}

nlohmann::ordered_json distribution_to_json(std::span<const LabelShare> shares) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : shares) {
    j[std::string(to_string(s.label))] = {{"count", s.count}, {"percent", s.percent}};
  }
  return j;
}

std::string obo_purl(std::string_view curie) {
  std::string local(curie);
  std::replace(local.begin(), local.end(), ':', '_');
  return "http://purl.obolibrary.org/obo/" + local;
}

nlohmann::ordered_json export_comparison(std::span<const LinkResult> run_a, std::span<const LinkResult> run_b,
                                         const RecordStore& records, std::string_view name_a,
                                         std::string_view name_b) {
  std::map<std::string, const LinkResult*> b_by_mention;
  for (const auto& r : run_b) b_by_mention.emplace(r.mention, &r);
  std::set<std::string> a_mentions;
  for (const auto& r : run_a) a_mentions.insert(r.mention);

  std::set<std::string> unaligned;
  for (const auto& m : a_mentions) {
    if (!b_by_mention.contains(m)) unaligned.insert(m);
  }
  for (const auto& [m, r] : b_by_mention) {
    if (!a_mentions.contains(m)) unaligned.insert(m);
  }
  if (!unaligned.empty()) throw MentionMismatch({unaligned.begin(), unaligned.end()});

  nlohmann::ordered_json out;
  out["format"] = "ontolink-comparison";
  out["version"] = 1;
  out["system_a"] = std::string(name_a);
  out["system_b"] = std::string(name_b);
  auto rows = nlohmann::ordered_json::array();
  std::set<std::string> emitted;
  for (const auto& a : run_a) {
    if (!emitted.insert(a.mention).second) continue;
    nlohmann::ordered_json row;
    row["mention"] = a.mention;
    row["side_a"] = side_json(a, records);
    row["side_b"] = side_json(*b_by_mention.at(a.mention), records);
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  return out;
}

}  // namespace ontolink
