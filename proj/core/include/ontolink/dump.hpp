#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontolink/entity.hpp"

namespace ontolink {

// Dump format: a JSON array of objects with exactly the keys
//   curie, label, synonyms, definition, relations, parents, ancestors
// in that order, sorted by CURIE, pretty-printed with a two-space indent.

nlohmann::ordered_json record_to_json(const EntityRecord& record);

/// Throws SchemaError on missing, unknown or mistyped keys.
EntityRecord record_from_json(const nlohmann::json& j);

void write_dump(std::span<const EntityRecord> records, std::ostream& sink);
std::string dump_to_string(std::span<const EntityRecord> records);

/// Throws SchemaError for malformed JSON or records.
std::vector<EntityRecord> load_dump(std::istream& source);
std::vector<EntityRecord> load_dump_string(std::string_view source);

/// Immutable CURIE-sorted record lookup. Throws DuplicateCurie.
class RecordStore {
 public:
  RecordStore() = default;
  explicit RecordStore(std::vector<EntityRecord> records);

  const EntityRecord* find(std::string_view curie) const;
  /// Throws UnknownCurie.
  const EntityRecord& at(std::string_view curie) const;

  const std::vector<EntityRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

 private:
  std::vector<EntityRecord> records_;
};

}  // namespace ontolink
