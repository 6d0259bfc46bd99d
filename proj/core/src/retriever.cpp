#include "ontolink/retriever.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

void RetrievalConfig::validate() const {
  if (k_tot > k_lex + k_sem) {
    throw ConfigError("k_tot (" + std::to_string(k_tot) + ") exceeds k_lex + k_sem (" +
                      std::to_string(k_lex + k_sem) + ")");
  }
}

void Mention::validate() const {
  if (text::trim(text).empty()) throw std::invalid_argument("mention text is empty");
}

std::string_view to_string(Branch b) { return b == Branch::lexical ? "lexical" : "semantic"; }

Candidate candidate_payload(const RecordStore& records, const ScoredHit& hit, Branch branch, std::size_t rank,
                            const RetrievalConfig& config) {
  const EntityRecord& r = records.at(hit.curie);
  Candidate c;
  c.curie = r.curie;
  c.label = r.label;
  c.matched_surface = hit.matched_surface;
  const auto shown = std::min(config.top_synonyms, r.synonyms.size());
  c.synonyms_shown.assign(r.synonyms.begin(), r.synonyms.begin() + static_cast<std::ptrdiff_t>(shown));
  if (text::utf8_length(r.definition) > config.snippet_chars) {
    c.definition_snippet = text::utf8_prefix(r.definition, config.snippet_chars) + "…";
  } else {
    c.definition_snippet = r.definition;
  }
  for (const auto& [name, targets] : r.relations) {
    if (targets.empty()) continue;
    const auto n = std::min(config.relation_targets, targets.size());
    c.relations_shown.push_back({name, {targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(n)}});
  }
  c.branch = branch;
  c.branch_rank = rank;
  c.surface_forms.reserve(r.synonyms.size() + 1);
  c.surface_forms.push_back(r.label);
  c.surface_forms.insert(c.surface_forms.end(), r.synonyms.begin(), r.synonyms.end());
  return c;
}

std::string semantic_query_text(const Mention& mention) {
  if (mention.context && !text::trim(*mention.context).empty()) return mention.text + " " + *mention.context;
  return mention.text;
}

int match_tier(const Candidate& candidate, std::string_view mention) {
  const auto needle = text::trim(mention);
  for (const auto& s : candidate.surface_forms) {
    if (text::iequals(text::trim(s), needle)) return 0;
  }
  const auto tokens = tokenize(mention);
  if (tokens.empty()) return 2;
  for (const auto& s : candidate.surface_forms) {
    const auto have = tokenize(s);
    const bool covers = std::all_of(tokens.begin(), tokens.end(), [&have](const std::string& t) {
      return std::find(have.begin(), have.end(), t) != have.end();
    });
    if (covers) return 1;
  }
  return 2;
}

std::vector<Candidate> order_candidates(std::vector<Candidate> candidates, std::string_view mention, std::size_t k_tot) {
  std::vector<Candidate> unique;
  unique.reserve(candidates.size());
  std::unordered_set<std::string> seen;
  for (auto& c : candidates) {
    if (seen.insert(c.curie).second) unique.push_back(std::move(c));
  }

  std::vector<std::pair<int, Candidate>> tiered;
  tiered.reserve(unique.size());
  for (auto& c : unique) {
    const int tier = match_tier(c, mention);
    tiered.emplace_back(tier, std::move(c));
  }
  std::stable_sort(tiered.begin(), tiered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Candidate> out;
  out.reserve(std::min(k_tot, tiered.size()));
  for (auto& [tier, c] : tiered) {
    if (out.size() == k_tot) break;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> fuse_branches(std::vector<Candidate> lexical, std::vector<Candidate> semantic,
                                     std::string_view mention, std::size_t k_tot) {
  lexical.insert(lexical.end(), std::make_move_iterator(semantic.begin()), std::make_move_iterator(semantic.end()));
  return order_candidates(std::move(lexical), mention, k_tot);
}

std::vector<Candidate> interleave(const std::vector<std::vector<Candidate>>& lists) {
  std::vector<Candidate> out;
  std::size_t longest = 0;
  for (const auto& l : lists) longest = std::max(longest, l.size());
  for (std::size_t i = 0; i < longest; ++i) {
    for (const auto& l : lists) {
      if (i < l.size()) out.push_back(l[i]);
    }
  }
  return out;
}

std::vector<Candidate> retrieve(const Mention& mention, const RetrievalIndexes& indexes, const RetrievalConfig& config) {
  mention.validate();
  config.validate();

  std::vector<Candidate> lexical;
  const auto lex_hits = indexes.lexical.search(mention.text, config.k_lex);
  lexical.reserve(lex_hits.size());
  for (std::size_t i = 0; i < lex_hits.size(); ++i) {
    lexical.push_back(candidate_payload(indexes.records, lex_hits[i], Branch::lexical, i, config));
  }

  std::vector<Candidate> semantic;
  if (config.k_sem > 0 && indexes.vectors.size() > 0) {
    const auto query = embed_query(indexes.embedder, semantic_query_text(mention));
    const auto sem_hits = indexes.vectors.search(query, config.k_sem);
    semantic.reserve(sem_hits.size());
    const auto needle = text::trim(mention.text);
    for (std::size_t i = 0; i < sem_hits.size(); ++i) {
      auto c = candidate_payload(indexes.records, sem_hits[i], Branch::semantic, i, config);
      for (const auto& s : c.surface_forms) {
        if (text::iequals(text::trim(s), needle)) {
          c.matched_surface = s;
          break;
        }
      }
      semantic.push_back(std::move(c));
    }
  }
  return fuse_branches(std::move(lexical), std::move(semantic), mention.text, config.k_tot);
}

}  // namespace ontolink
