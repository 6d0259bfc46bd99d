#include "ontolink/ingest.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

// ---------------------------------------------------------------------------
// PrefixMap

PrefixMap::PrefixMap(std::vector<PrefixEntry> entries) {
  for (auto& e : entries) add(std::move(e.prefix), std::move(e.iri_base));
}

void PrefixMap::add(std::string prefix, std::string iri_base) {
  if (prefix.empty()) throw ConfigError("prefix map: empty prefix");
  if (iri_base.empty()) throw ConfigError("prefix map: empty IRI base for prefix " + prefix);
  if (prefix.find(':') != std::string::npos) throw ConfigError("prefix map: prefix contains ':': " + prefix);
  for (const auto& e : entries_) {
    if (e.prefix == prefix) throw ConfigError("prefix map: duplicate prefix " + prefix);
    if (e.iri_base == iri_base) throw ConfigError("prefix map: duplicate IRI base " + iri_base);
  }
  entries_.push_back({std::move(prefix), std::move(iri_base)});
}

std::optional<std::string> PrefixMap::to_curie(std::string_view iri) const {
  const PrefixEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (iri.starts_with(e.iri_base) && (best == nullptr || e.iri_base.size() > best->iri_base.size())) {
      best = &e;
    }
  }
  if (best == nullptr || iri.size() == best->iri_base.size()) return std::nullopt;
  return best->prefix + ":" + std::string(iri.substr(best->iri_base.size()));
}

std::optional<std::string> PrefixMap::expand(std::string_view curie) const {
  const auto colon = curie.find(':');
  if (colon == std::string_view::npos || colon + 1 == curie.size()) return std::nullopt;
  const auto prefix = curie.substr(0, colon);
  for (const auto& e : entries_) {
    if (e.prefix == prefix) return e.iri_base + std::string(curie.substr(colon + 1));
  }
  return std::nullopt;
}

std::optional<std::string> to_curie(std::string_view iri, const PrefixMap& prefixes) {
  return prefixes.to_curie(iri);
}

// ---------------------------------------------------------------------------
// IngestConfig

void IngestConfig::validate() const {
  std::set<std::string> names;
  for (const auto& r : relations) {
    if (text::trim(r.name).empty()) throw ConfigError("relation " + r.curie + " has an empty name");
    if (!prefixes.expand(r.curie)) throw ConfigError("relation CURIE cannot be expanded: " + r.curie);
  }
  std::set<std::string> seen;
  for (const auto& p : id_patterns) {
    if (!seen.insert(p.prefix).second) throw ConfigError("duplicate id pattern for prefix " + p.prefix);
    try {
      std::regex re(p.regex);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid id pattern for " + p.prefix + ": " + e.what());
    }
  }
  if (concept_classes.empty()) throw ConfigError("no concept classes configured");
}

IngestConfig IngestConfig::foodon_defaults() {
  IngestConfig c;
  const std::string obo = "http://purl.obolibrary.org/obo/";
  for (const char* p : {"FOODON", "NCBITaxon", "UBERON", "CHEBI", "ENVO", "PATO", "RO", "BFO", "IAO", "OBI"}) {
    c.prefixes.add(p, obo + p + "_");
  }
  c.prefixes.add("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#");
  c.prefixes.add("rdfs", "http://www.w3.org/2000/01/rdf-schema#");
  c.prefixes.add("owl", "http://www.w3.org/2002/07/owl#");
  c.prefixes.add("skos", "http://www.w3.org/2004/02/skos/core#");
  c.relations = {
      {"rdfs:subClassOf", "is_a"},
      {"RO:0001000", "derives_from"},
      {"RO:0002162", "in_taxon"},
  };
  c.id_patterns = {
      {"FOODON", R"(^FOODON:\d{8}$)"},
      {"NCBITaxon", R"(^NCBITaxon:\d+$)"},
      {"UBERON", R"(^UBERON:\d{7}$)"},
      {"CHEBI", R"(^CHEBI:\d+$)"},
      {"ENVO", R"(^ENVO:\d{8}$)"},
      {"PATO", R"(^PATO:\d{7}$)"},
  };
  return c;
}

IngestConfig IngestConfig::from_json(const nlohmann::json& j) {
  try {
    IngestConfig c;
    if (!j.is_object()) throw ConfigError("ingest config must be a JSON object");
    for (const auto& [prefix, base] : j.at("prefixes").items()) {
      c.prefixes.add(prefix, base.get<std::string>());
    }
    if (j.contains("relations")) {
      for (const auto& r : j.at("relations")) {
        c.relations.push_back({r.at("curie").get<std::string>(), r.at("name").get<std::string>()});
      }
    }
    if (j.contains("id_patterns")) {
      for (const auto& [prefix, re] : j.at("id_patterns").items()) {
        c.id_patterns.push_back({prefix, re.get<std::string>()});
      }
    }
    if (j.contains("concept_classes")) {
      c.concept_classes = j.at("concept_classes").get<std::vector<std::string>>();
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ingest config: ") + e.what());
  }
}

nlohmann::json IngestConfig::to_json() const {
  nlohmann::json j;
  j["prefixes"] = nlohmann::json::object();
  for (const auto& e : prefixes.entries()) j["prefixes"][e.prefix] = e.iri_base;
  j["relations"] = nlohmann::json::array();
  for (const auto& r : relations) j["relations"].push_back({{"curie", r.curie}, {"name", r.name}});
  j["id_patterns"] = nlohmann::json::object();
  for (const auto& p : id_patterns) j["id_patterns"][p.prefix] = p.regex;
  j["concept_classes"] = concept_classes;
  return j;
}

CurieValidator::CurieValidator(const IngestConfig& config) {
  for (const auto& p : config.id_patterns) {
    try {
      patterns_.emplace(p.prefix, std::regex(p.regex, std::regex::ECMAScript | std::regex::optimize));
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid id pattern for " + p.prefix + ": " + e.what());
    }
  }
}

bool CurieValidator::operator()(std::string_view curie) const {
  const auto colon = curie.find(':');
  if (colon == std::string_view::npos) return false;
  const auto it = patterns_.find(curie.substr(0, colon));
  if (it == patterns_.end()) return false;
  return std::regex_match(curie.begin(), curie.end(), it->second);
}

bool validate_curie(std::string_view curie, const IngestConfig& config) {
  return CurieValidator(config)(curie);
}

nlohmann::ordered_json IngestReport::to_json() const {
  nlohmann::ordered_json j;
  j["typed_subjects"] = typed_subjects;
  j["emitted"] = emitted;
  j["skipped"] = skipped;
  j["skipped_by_reason"] = nlohmann::ordered_json::object();
  for (const auto& [reason, n] : skipped_by_reason) j["skipped_by_reason"][reason] = n;
  return j;
}

// ---------------------------------------------------------------------------
// Entity extraction

namespace {

const std::set<std::string_view> kPropertyTypes = {
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property",
    "http://www.w3.org/2002/07/owl#ObjectProperty",
    "http://www.w3.org/2002/07/owl#DatatypeProperty",
    "http://www.w3.org/2002/07/owl#AnnotationProperty",
    "http://www.w3.org/2002/07/owl#FunctionalProperty",
    "http://www.w3.org/2002/07/owl#InverseFunctionalProperty",
    "http://www.w3.org/2002/07/owl#TransitiveProperty",
    "http://www.w3.org/2002/07/owl#SymmetricProperty",
    "http://www.w3.org/2002/07/owl#AsymmetricProperty",
    "http://www.w3.org/2002/07/owl#ReflexiveProperty",
    "http://www.w3.org/2002/07/owl#IrreflexiveProperty",
};

const std::set<std::string_view> kSynonymPredicates = {
    vocab::obo_exact_synonym, vocab::obo_related_synonym, vocab::obo_broad_synonym,
    vocab::obo_narrow_synonym, vocab::skos_alt_label,
};

// Untagged literals and English-tagged literals are kept.
bool accepted_literal(const Term& t) {
  if (!t.is_literal()) return false;
  return t.language.empty() || t.language == "en" || t.language.starts_with("en-");
}

bool is_true_literal(const Term& t) {
  return t.is_literal() && (t.value == "true" || t.value == "1");
}

std::vector<std::string> literal_values(const std::vector<const Triple*>& statements,
                                        std::string_view predicate) {
  std::vector<std::string> out;
  for (const Triple* t : statements) {
    if (t->predicate.value == predicate && accepted_literal(t->object)) {
      auto v = std::string(text::trim(t->object.value));
      if (!v.empty()) out.push_back(std::move(v));
    }
  }
  return out;
}

void push_unique(std::vector<std::string>& v, std::string s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

using ParentMap = std::map<std::string, std::vector<std::string>>;

// Every concept reachable through parent links, excluding the start node.
// Cycles are tolerated: members of a cycle reach each other.
std::vector<std::string> reachable_ancestors(const std::string& start, const ParentMap& parents) {
  std::set<std::string> seen;
  std::vector<const std::string*> stack{&start};
  while (!stack.empty()) {
    const std::string* node = stack.back();
    stack.pop_back();
    const auto it = parents.find(*node);
    if (it == parents.end()) continue;
    for (const auto& p : it->second) {
      if (seen.insert(p).second) stack.push_back(&p);
    }
  }
  seen.erase(start);
  return {seen.begin(), seen.end()};
}

}  // namespace

IngestResult extract_entities(const TripleSet& triples, const IngestConfig& config) {
  config.validate();
  const CurieValidator is_valid(config);
  const std::set<std::string, std::less<>> concept_classes(config.concept_classes.begin(),
                                                           config.concept_classes.end());

  std::unordered_multimap<std::string, std::string> relation_names;  // predicate IRI -> name
  for (const auto& r : config.relations) relation_names.emplace(*config.prefixes.expand(r.curie), r.name);

  std::unordered_map<std::string, std::vector<const Triple*>> by_iri;
  std::unordered_map<std::string, std::vector<const Triple*>> by_blank;
  std::vector<std::string> typed_subjects;
  std::unordered_set<std::string> typed_seen;
  for (const Triple& t : triples) {
    if (t.subject.is_iri()) {
      by_iri[t.subject.value].push_back(&t);
      if (t.predicate.value == vocab::rdf_type && typed_seen.insert(t.subject.value).second) {
        typed_subjects.push_back(t.subject.value);
      }
    } else if (t.subject.is_blank()) {
      by_blank[t.subject.value].push_back(&t);
    }
  }

  IngestResult result;
  auto& report = result.report;
  report.typed_subjects = typed_subjects.size();
  const auto skip = [&report](std::string_view reason) {
    ++report.skipped;
    ++report.skipped_by_reason[std::string(reason)];
  };

  // Facets of several IRIs that map to the same CURIE are merged.
  std::map<std::string, std::vector<const Triple*>> statements_by_curie;
  for (const auto& iri : typed_subjects) {
    const auto& statements = by_iri[iri];
    bool is_concept = false;
    bool is_property = false;
    bool deprecated = false;
    for (const Triple* t : statements) {
      if (t->predicate.value == vocab::rdf_type && t->object.is_iri()) {
        is_concept = is_concept || concept_classes.contains(t->object.value);
        is_property = is_property || kPropertyTypes.contains(t->object.value);
      } else if (t->predicate.value == vocab::owl_deprecated) {
        deprecated = deprecated || is_true_literal(t->object);
      }
    }
    if (!is_concept || is_property) {
      skip(skip_reason::not_a_concept);
      continue;
    }
    const auto curie = config.prefixes.to_curie(iri);
    if (!curie) {
      skip(skip_reason::no_curie);
      continue;
    }
    if (!is_valid(*curie)) {
      skip(skip_reason::invalid_identifier);
      continue;
    }
    if (deprecated) {
      skip(skip_reason::deprecated);
      continue;
    }
    auto& merged = statements_by_curie[*curie];
    merged.insert(merged.end(), statements.begin(), statements.end());
  }

  std::map<std::string, EntityRecord> records;
  for (const auto& [curie, statements] : statements_by_curie) {
    auto labels = literal_values(statements, vocab::rdfs_label);
    if (labels.empty()) labels = literal_values(statements, vocab::skos_pref_label);
    if (labels.empty()) {
      skip(skip_reason::no_label);
      continue;
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    EntityRecord rec;
    rec.curie = curie;
    rec.label = labels.front();

    std::vector<std::string> surface;
    for (const Triple* t : statements) {
      if (kSynonymPredicates.contains(t->predicate.value) && accepted_literal(t->object)) {
        surface.emplace_back(text::trim(t->object.value));
      }
    }
    surface.insert(surface.end(), labels.begin() + 1, labels.end());
    std::unordered_set<std::string> folded{text::to_lower(rec.label)};
    for (auto& s : surface) {
      if (!s.empty() && folded.insert(text::to_lower(s)).second) rec.synonyms.push_back(std::move(s));
    }

    auto definitions = literal_values(statements, vocab::iao_definition);
    if (definitions.empty()) definitions = literal_values(statements, vocab::skos_definition);
    if (!definitions.empty()) rec.definition = definitions.front();

    records.emplace(curie, std::move(rec));
  }

  ParentMap parents;
  for (auto& [curie, rec] : records) {
    const auto& statements = statements_by_curie.at(curie);
    const auto add_relation = [&](const std::string& predicate, const Term& object) {
      if (!object.is_iri()) return;
      const auto [lo, hi] = relation_names.equal_range(predicate);
      if (lo == hi) return;
      const auto target = config.prefixes.to_curie(object.value);
      if (!target) return;
      for (auto it = lo; it != hi; ++it) push_unique(rec.relations[it->second], *target);
    };

    for (const Triple* t : statements) {
      const auto& pred = t->predicate.value;
      const bool hierarchical = pred == vocab::rdfs_subclass_of || pred == vocab::skos_broader;
      if (hierarchical && t->object.is_iri()) {
        if (const auto parent = config.prefixes.to_curie(t->object.value);
            parent && *parent != curie && records.contains(*parent)) {
          push_unique(parents[curie], *parent);
        }
      }
      if (pred == vocab::rdfs_subclass_of && t->object.is_blank()) {
        // Existential/universal restriction: subClassOf [onProperty P; someValuesFrom X].
        const auto it = by_blank.find(t->object.value);
        if (it == by_blank.end()) continue;
        const Triple* on_property = nullptr;
        for (const Triple* r : it->second) {
          if (r->predicate.value == vocab::owl_on_property && r->object.is_iri()) on_property = r;
        }
        if (on_property == nullptr) continue;
        for (const Triple* r : it->second) {
          const auto& rp = r->predicate.value;
          if (rp == vocab::owl_some_values_from || rp == vocab::owl_all_values_from ||
              rp == vocab::owl_has_value) {
            add_relation(on_property->object.value, r->object);
          }
        }
        continue;
      }
      add_relation(pred, t->object);
    }
  }

  result.records.reserve(records.size());
  for (auto& [curie, rec] : records) {
    if (auto it = parents.find(curie); it != parents.end()) {
      rec.parents = it->second;
      std::sort(rec.parents.begin(), rec.parents.end());
    }
    rec.ancestors = reachable_ancestors(curie, parents);
    result.records.push_back(std::move(rec));
  }
  report.emitted = result.records.size();
  return result;
}

}  // namespace ontolink
