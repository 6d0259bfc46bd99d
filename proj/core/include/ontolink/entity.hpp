#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ontolink {

/// Stored in place of a missing textual definition.
inline constexpr std::string_view kUndefinedDefinition = "Undefined";

/// One ontology concept as it appears in a dump.
///
/// Invariants: `label` is non-empty; `synonyms` holds no duplicates and never
/// the label (case-insensitive); `parents` is a subset of `ancestors`, and no
/// record lists itself as an ancestor.
struct EntityRecord {
  std::string curie;
  std::string label;
  std::vector<std::string> synonyms;
  std::string definition{kUndefinedDefinition};
  std::map<std::string, std::vector<std::string>> relations;
  std::vector<std::string> parents;
  std::vector<std::string> ancestors;

  bool has_definition() const { return definition != kUndefinedDefinition; }

  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

}  // namespace ontolink
