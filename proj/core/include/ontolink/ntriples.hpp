#pragma once

#include <compare>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ontolink {

enum class TermKind { iri, blank, literal };

/// One RDF term. `datatype` and `language` are only meaningful for literals.
struct Term {
  TermKind kind = TermKind::iri;
  std::string value;
  std::string datatype;
  std::string language;

  static Term iri(std::string v) { return {TermKind::iri, std::move(v), {}, {}}; }
  static Term blank(std::string v) { return {TermKind::blank, std::move(v), {}, {}}; }
  static Term literal(std::string v, std::string datatype = {}, std::string language = {}) {
    return {TermKind::literal, std::move(v), std::move(datatype), std::move(language)};
  }

  bool is_iri() const noexcept { return kind == TermKind::iri; }
  bool is_blank() const noexcept { return kind == TermKind::blank; }
  bool is_literal() const noexcept { return kind == TermKind::literal; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// A set of triples that remembers first-insertion order. Duplicate
/// statements are dropped.
class TripleSet {
 public:
  bool insert(Triple t);

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  auto begin() const noexcept { return triples_.begin(); }
  auto end() const noexcept { return triples_.end(); }

 private:
  std::vector<Triple> triples_;
  std::unordered_set<std::string> keys_;
};

enum class RdfFormat { ntriples };

/// Parses an RDF document into triples without any filtering.
/// Throws SyntaxError naming the offending line.
TripleSet parse_graph(std::istream& source, RdfFormat format = RdfFormat::ntriples);
TripleSet parse_ntriples(std::string_view document);

}  // namespace ontolink
