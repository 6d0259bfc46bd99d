#include "ontolink/dump.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

constexpr std::array<std::string_view, 7> kKeys = {"curie",     "label",     "synonyms", "definition",
                                                   "relations", "parents", "ancestors"};

std::string require_string(const nlohmann::json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) throw SchemaError("key \"" + std::string(key) + "\" must be a string");
  return v.get<std::string>();
}

std::vector<std::string> require_string_array(const nlohmann::json& v, std::string_view key) {
  if (!v.is_array()) throw SchemaError("key \"" + std::string(key) + "\" must be an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_string()) throw SchemaError("key \"" + std::string(key) + "\" must hold only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

nlohmann::ordered_json record_to_json(const EntityRecord& r) {
  nlohmann::ordered_json j;
  j["curie"] = r.curie;
  j["label"] = r.label;
  j["synonyms"] = r.synonyms;
  j["definition"] = r.definition;
  j["relations"] = nlohmann::ordered_json::object();
  for (const auto& [name, targets] : r.relations) j["relations"][name] = targets;
  j["parents"] = r.parents;
  j["ancestors"] = r.ancestors;
  return j;
}

EntityRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("dump entry must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw SchemaError("unknown key \"" + key + "\"");
    }
  }
  for (const auto key : kKeys) {
    if (!j.contains(std::string(key))) throw SchemaError("missing key \"" + std::string(key) + "\"");
  }

  EntityRecord r;
  r.curie = require_string(j, "curie");
  r.label = require_string(j, "label");
  if (r.curie.empty()) throw SchemaError("empty curie");
  if (r.label.empty()) throw SchemaError("empty label for " + r.curie);
  r.synonyms = require_string_array(j.at("synonyms"), "synonyms");
  r.definition = require_string(j, "definition");
  const auto& relations = j.at("relations");
  if (!relations.is_object()) throw SchemaError("key \"relations\" must be an object");
  for (const auto& [name, targets] : relations.items()) {
    r.relations.emplace(name, require_string_array(targets, "relations"));
  }
  r.parents = require_string_array(j.at("parents"), "parents");
  r.ancestors = require_string_array(j.at("ancestors"), "ancestors");
  return r;
}

void write_dump(std::span<const EntityRecord> records, std::ostream& sink) {
  std::vector<const EntityRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->curie < b->curie; });

  auto array = nlohmann::ordered_json::array();
  for (const auto* r : sorted) array.push_back(record_to_json(*r));
  sink << array.dump(2) << '\n';
}

std::string dump_to_string(std::span<const EntityRecord> records) {
  std::ostringstream out;
  write_dump(records, out);
  return out.str();
}

std::vector<EntityRecord> load_dump(std::istream& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("dump is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("dump must be a JSON array");
  std::vector<EntityRecord> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(record_from_json(j[i]));
    } catch (const SchemaError& e) {
      throw SchemaError("dump entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EntityRecord> load_dump_string(std::string_view source) {
  std::istringstream in{std::string(source)};
  return load_dump(in);
}

RecordStore::RecordStore(std::vector<EntityRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) { return a.curie < b.curie; });
  const auto dup = std::adjacent_find(records_.begin(), records_.end(),
                                      [](const auto& a, const auto& b) { return a.curie == b.curie; });
  if (dup != records_.end()) throw DuplicateCurie(dup->curie);
}

const EntityRecord* RecordStore::find(std::string_view curie) const {
  const auto it = std::lower_bound(records_.begin(), records_.end(), curie,
                                   [](const EntityRecord& r, std::string_view c) { return r.curie < c; });
  return (it != records_.end() && it->curie == curie) ? &*it : nullptr;
}

const EntityRecord& RecordStore::at(std::string_view curie) const {
  if (const auto* r = find(curie)) return *r;
  throw UnknownCurie(std::string(curie));
}

}  // namespace ontolink
