#include "ontolink/lexical_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

constexpr std::string_view kFormat = "ontolink-lexical-index";
constexpr int kVersion = 1;

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::array<std::string, kFieldCount> field_texts(const EntityRecord& r) {
  std::array<std::string, kFieldCount> out;
  out[0] = r.label;
  out[1] = text::join(r.synonyms, " ; ");
  if (r.has_definition()) out[2] = r.definition;
  std::vector<std::string> names;
  for (const auto& [name, targets] : r.relations) {
    if (!targets.empty()) names.push_back(name);
  }
  out[3] = text::join(names, " ");
  return out;
}

bool hit_order(const ScoredHit& a, const ScoredHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.curie < b.curie;
}

LexicalIndex LexicalIndex::build(std::span<const EntityRecord> records, const Bm25Params& params) {
  std::vector<const EntityRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->curie < b->curie; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->curie == sorted[i - 1]->curie) throw DuplicateCurie(sorted[i]->curie);
  }

  LexicalIndex index;
  index.params_ = params;
  index.curies_.reserve(sorted.size());
  index.lengths_.reserve(sorted.size());
  index.surfaces_.reserve(sorted.size());

  for (std::uint32_t doc = 0; doc < sorted.size(); ++doc) {
    const EntityRecord& r = *sorted[doc];
    index.curies_.push_back(r.curie);
    std::vector<std::string> surfaces{r.label};
    surfaces.insert(surfaces.end(), r.synonyms.begin(), r.synonyms.end());
    index.surfaces_.push_back(std::move(surfaces));

    std::array<std::uint32_t, kFieldCount> lengths{};
    const auto texts = field_texts(r);
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      const auto tokens = tokenize(texts[f]);
      lengths[f] = static_cast<std::uint32_t>(tokens.size());
      // Count within this field, preserving first-seen order.
      std::vector<std::pair<std::string, std::uint32_t>> counts;
      for (const auto& t : tokens) {
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == t; });
        if (it == counts.end()) {
          counts.emplace_back(t, 1);
        } else {
          ++it->second;
        }
      }
      for (auto& [token, tf] : counts) {
        index.postings_[token].postings.push_back({doc, static_cast<Field>(f), tf});
      }
    }
    index.lengths_.push_back(lengths);
  }
  index.finalize();
  return index;
}

void LexicalIndex::finalize() {
  avg_lengths_.fill(0.0);
  if (!lengths_.empty()) {
    std::array<double, kFieldCount> totals{};
    for (const auto& l : lengths_) {
      for (std::size_t f = 0; f < kFieldCount; ++f) totals[f] += l[f];
    }
    for (std::size_t f = 0; f < kFieldCount; ++f) totals[f] /= static_cast<double>(lengths_.size());
    avg_lengths_ = totals;
  }
  for (auto& [token, entry] : postings_) {
    std::sort(entry.postings.begin(), entry.postings.end(), [](const Posting& a, const Posting& b) {
      return a.doc != b.doc ? a.doc < b.doc : a.field < b.field;
    });
    entry.df.fill(0);
    for (const auto& p : entry.postings) ++entry.df[static_cast<std::size_t>(p.field)];
  }
}

std::vector<ScoredHit> LexicalIndex::search(std::string_view query, std::size_t k) const {
  if (k == 0 || curies_.empty()) return {};

  std::vector<std::string> tokens;
  for (auto& t : tokenize(query)) {
    if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(std::move(t));
  }

  const double n = static_cast<double>(curies_.size());
  std::vector<double> scores(curies_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& token : tokens) {
    const auto it = postings_.find(token);
    if (it == postings_.end()) continue;
    const TermEntry& entry = it->second;
    std::array<double, kFieldCount> idf{};
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      const double df = entry.df[f];
      idf[f] = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }
    for (const Posting& p : entry.postings) {
      const auto f = static_cast<std::size_t>(p.field);
      const double tf = p.tf;
      const double norm = 1.0 - params_.b + params_.b * lengths_[p.doc][f] / avg_lengths_[f];
      const double term = idf[f] * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += params_.boosts[f] * term;
    }
  }

  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  const auto by_rank = [&scores](std::uint32_t a, std::uint32_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  const std::size_t take = std::min(k, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(take), touched.end(), by_rank);

  const auto trimmed = text::trim(query);
  std::vector<ScoredHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto doc = touched[i];
    ScoredHit hit{curies_[doc], scores[doc], std::nullopt};
    for (const auto& s : surfaces_[doc]) {
      if (text::iequals(text::trim(s), trimmed)) {
        hit.matched_surface = s;
        break;
      }
    }
    hits.push_back(std::move(hit));
  }
  return hits;
}

const std::vector<LexicalIndex::Posting>* LexicalIndex::postings(std::string_view token) const {
  const auto it = postings_.find(std::string(token));
  return it == postings_.end() ? nullptr : &it->second.postings;
}

std::optional<std::size_t> LexicalIndex::doc_of(std::string_view curie) const {
  const auto it = std::lower_bound(curies_.begin(), curies_.end(), curie);
  if (it == curies_.end() || *it != curie) return std::nullopt;
  return static_cast<std::size_t>(it - curies_.begin());
}

std::uint32_t LexicalIndex::term_frequency(std::string_view curie, Field field, std::string_view token) const {
  const auto doc = doc_of(curie);
  const auto* list = postings(token);
  if (!doc || list == nullptr) return 0;
  for (const auto& p : *list) {
    if (p.doc == *doc && p.field == field) return p.tf;
  }
  return 0;
}

void LexicalIndex::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["params"] = {{"k1", params_.k1}, {"b", params_.b}, {"boosts", params_.boosts}};
  auto docs = nlohmann::json::array();
  for (std::size_t d = 0; d < curies_.size(); ++d) {
    docs.push_back({{"curie", curies_[d]}, {"lengths", lengths_[d]}, {"surfaces", surfaces_[d]}});
  }
  j["docs"] = std::move(docs);
  auto postings = nlohmann::json::object();
  for (const auto& [token, entry] : postings_) {
    auto list = nlohmann::json::array();
    for (const auto& p : entry.postings) list.push_back({p.doc, static_cast<int>(p.field), p.tf});
    postings[token] = std::move(list);
  }
  j["postings"] = std::move(postings);
  out << j.dump() << '\n';
}

LexicalIndex LexicalIndex::load(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != kFormat || j.at("version") != kVersion) {
      throw SchemaError("not an ontolink lexical index (format/version mismatch)");
    }
    LexicalIndex index;
    const auto& p = j.at("params");
    index.params_.k1 = p.at("k1").get<double>();
    index.params_.b = p.at("b").get<double>();
    index.params_.boosts = p.at("boosts").get<std::array<double, kFieldCount>>();
    for (const auto& d : j.at("docs")) {
      index.curies_.push_back(d.at("curie").get<std::string>());
      index.lengths_.push_back(d.at("lengths").get<std::array<std::uint32_t, kFieldCount>>());
      index.surfaces_.push_back(d.at("surfaces").get<std::vector<std::string>>());
    }
    if (!std::is_sorted(index.curies_.begin(), index.curies_.end()) ||
        std::adjacent_find(index.curies_.begin(), index.curies_.end()) != index.curies_.end()) {
      throw SchemaError("lexical index documents must be unique and sorted by CURIE");
    }
    for (const auto& [token, list] : j.at("postings").items()) {
      auto& entry = index.postings_[token];
      for (const auto& item : list) {
        const auto doc = item.at(0).get<std::uint32_t>();
        const auto field = item.at(1).get<int>();
        const auto tf = item.at(2).get<std::uint32_t>();
        if (doc >= index.curies_.size() || field < 0 || field >= static_cast<int>(kFieldCount) || tf == 0) {
          throw SchemaError("lexical index posting out of range for token \"" + token + "\"");
        }
        entry.postings.push_back({doc, static_cast<Field>(field), tf});
      }
    }
    index.finalize();
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("lexical index: ") + e.what());
  }
}

}  // namespace ontolink
