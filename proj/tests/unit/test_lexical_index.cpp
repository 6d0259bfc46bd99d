#include <doctest.h>

#include <random>
#include <sstream>

#include "ontolink/errors.hpp"
#include "ontolink/lexical_index.hpp"
#include "test_support.hpp"

using namespace ontolink;
namespace t = ontolink::testing;

namespace {

EntityRecord labelled(const std::string& curie, const std::string& label) {
  EntityRecord r;
  r.curie = curie;
  r.label = label;
  return r;
}

EntityRecord whole_wheat_flour() {
  EntityRecord r;
  r.curie = "FOODON:03302340";
  r.label = "whole wheat flour";
  r.synonyms = {"wholemeal flour", "graham flour"};
  r.relations = {{"is_a", {"FOODON:00001210"}}};
  return r;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Whole Wheat flour") == std::vector<std::string>{"whole", "wheat", "flour"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("E-330 (citric acid)") == std::vector<std::string>{"e", "330", "citric", "acid"});
  CHECK(tokenize("  --  ").empty());
  CHECK(tokenize("caf\xC3\xA9 au lait") == std::vector<std::string>{"caf\xC3\xA9", "au", "lait"});
}

TEST_CASE("empty corpus answers nothing") {
  const auto index = build_lexical_index({});
  CHECK(index.doc_count() == 0);
  CHECK(search_lexical(index, "flour", 10).empty());
}

TEST_CASE("graham is posted to the synonyms field") {
  const std::vector<EntityRecord> records{whole_wheat_flour()};
  const auto index = build_lexical_index(records);
  const auto* postings = index.postings("graham");
  REQUIRE(postings != nullptr);
  REQUIRE(postings->size() == 1);
  CHECK(index.curie((*postings)[0].doc) == "FOODON:03302340");
  CHECK((*postings)[0].field == Field::synonyms);
  CHECK((*postings)[0].tf == 1);
  CHECK(index.term_frequency("FOODON:03302340", Field::synonyms, "flour") == 2);
}

TEST_CASE("duplicate CURIEs are rejected") {
  const std::vector<EntityRecord> records{labelled("FOODON:00000001", "a"), labelled("FOODON:00000001", "b")};
  CHECK_THROWS_AS(build_lexical_index(records), DuplicateCurie);
}

TEST_CASE("three-document corpus matches the formula oracle") {
  const std::vector<EntityRecord> records{labelled("FOODON:00000001", "whole wheat flour"),
                                          labelled("FOODON:00000002", "wheat flour food product"),
                                          labelled("FOODON:00000003", "rice flour")};
  const auto index = build_lexical_index(records);
  const auto hits = search_lexical(index, "wheat flour", 10);
  const auto oracle = t::bm25_oracle(records, "wheat flour");
  CHECK(t::compare_topk(hits, oracle, 10, 1e-9) == "");
  REQUIRE(hits.size() == 3);
  // The shorter label with both tokens outranks the longer one; rice flour
  // only shares "flour".
  CHECK(hits[0].curie == "FOODON:00000001");
  CHECK(hits[1].curie == "FOODON:00000002");
  CHECK(hits[2].curie == "FOODON:00000003");
}

TEST_CASE("exact surface matches are reported") {
  const std::vector<EntityRecord> records{whole_wheat_flour()};
  const auto index = build_lexical_index(records);
  const auto hits = search_lexical(index, "Graham Flour", 5);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].matched_surface == "graham flour");
  CHECK_FALSE(search_lexical(index, "graham", 5)[0].matched_surface.has_value());
}

TEST_CASE("unseen tokens and k = 0 return nothing") {
  const std::vector<EntityRecord> records{whole_wheat_flour()};
  const auto index = build_lexical_index(records);
  CHECK(search_lexical(index, "quinoa", 5).empty());
  CHECK(search_lexical(index, "flour", 0).empty());
  CHECK(search_lexical(index, "", 5).empty());
}

TEST_CASE("the Undefined sentinel is not indexed") {
  const std::vector<EntityRecord> records{whole_wheat_flour()};
  const auto index = build_lexical_index(records);
  CHECK(index.postings("undefined") == nullptr);
}

TEST_CASE("randomized corpora agree with the brute-force scorer") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = t::random_corpus(rng, 120);
    const auto index = build_lexical_index(records);
    for (int q = 0; q < 5; ++q) {
      const auto query = t::random_phrase(rng, 1, 4);
      const std::size_t k = 1 + rng() % 20;
      const auto hits = search_lexical(index, query, k);
      const auto verdict = t::compare_topk(hits, t::bm25_oracle(records, query), k, 1e-9);
      INFO("trial " << trial << " query '" << query << "'");
      CHECK(verdict == "");
    }
  }
}

TEST_CASE("saved indexes answer exactly like rebuilt ones") {
  std::mt19937_64 rng(7);
  const auto records = t::random_corpus(rng, 60);
  const auto index = build_lexical_index(records);
  std::stringstream buf;
  index.save(buf);
  const auto loaded = LexicalIndex::load(buf);
  CHECK(loaded.doc_count() == index.doc_count());
  for (int q = 0; q < 20; ++q) {
    const auto query = t::random_phrase(rng, 1, 3);
    CHECK(search_lexical(loaded, query, 10) == search_lexical(index, query, 10));
  }
  std::stringstream again;
  loaded.save(again);
  std::stringstream first;
  index.save(first);
  CHECK(again.str() == first.str());
}

TEST_CASE("corrupt index files are rejected") {
  std::stringstream garbage("{\"format\": \"something else\", \"version\": 1}");
  CHECK_THROWS_AS(LexicalIndex::load(garbage), SchemaError);
  std::stringstream broken("{");
  CHECK_THROWS_AS(LexicalIndex::load(broken), SchemaError);
}

TEST_CASE("input order does not matter") {
  std::mt19937_64 rng(99);
  auto records = t::random_corpus(rng, 40);
  const auto a = build_lexical_index(records);
  std::reverse(records.begin(), records.end());
  const auto b = build_lexical_index(records);
  for (int q = 0; q < 10; ++q) {
    const auto query = t::random_phrase(rng, 1, 3);
    CHECK(search_lexical(a, query, 15) == search_lexical(b, query, 15));
  }
}
