#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ontolink/embedding.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/vector_index.hpp"
#include "test_support.hpp"

using namespace ontolink;
namespace t = ontolink::testing;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

EntityRecord record(const std::string& curie, const std::string& label) {
  EntityRecord r;
  r.curie = curie;
  r.label = label;
  return r;
}

class FailingEmbedder final : public EmbeddingProvider {
 public:
  explicit FailingEmbedder(std::string poison) : poison_(std::move(poison)) {}
  std::string name() const override { return "failing"; }
  std::size_t dimension() const override { return 8; }
  std::vector<double> embed(std::string_view text) const override {
    if (text.find(poison_) != std::string_view::npos) throw ProviderError("boom");
    return fallback_embed(text, 8);
  }

 private:
  std::string poison_;
};

}  // namespace

TEST_CASE("embedding_text template") {
  EntityRecord r = record("FOODON:03302340", "whole wheat flour");
  r.synonyms = {"wholemeal flour", "graham flour"};
  CHECK(embedding_text(r) == "whole wheat flour; synonyms: wholemeal flour, graham flour");
  r.definition = "Flour from whole grains.";
  CHECK(embedding_text(r) == "whole wheat flour; synonyms: wholemeal flour, graham flour; Flour from whole grains.");
  CHECK(embedding_text(record("FOODON:1", "salt")) == "salt");
}

TEST_CASE("fallback_embed") {
  const auto a = fallback_embed("whole wheat flour", 384);
  CHECK(a.size() == 384);
  CHECK(a == fallback_embed("whole wheat flour", 384));
  CHECK(std::abs(norm(a) - 1.0) < 1e-9);
  CHECK(a == fallback_embed("flour WHOLE wheat", 384));

  const auto e = fallback_embed("", 16);
  CHECK(e[0] == 1.0);
  CHECK(std::abs(norm(e) - 1.0) < 1e-12);
  CHECK(fallback_embed("  ;; ", 16) == e);
  CHECK(fallback_embed("x", 1) == std::vector<double>{1.0});
  CHECK(token_hash("flour") == token_hash("flour"));
  CHECK(token_hash("flour") != token_hash("flout"));
}

TEST_CASE("build: shape, unit rows and CURIE order") {
  const std::vector<EntityRecord> records{record("FOODON:3", "rice"), record("FOODON:1", "salt"),
                                          record("FOODON:2", "sugar")};
  const HashingEmbedder embedder;
  const auto index = build_vector_index(records, embedder);
  CHECK(index.size() == 3);
  CHECK(index.dimension() == 384);
  CHECK(index.curies() == std::vector<std::string>{"FOODON:1", "FOODON:2", "FOODON:3"});
  for (std::size_t i = 0; i < index.size(); ++i) {
    double s = 0;
    for (const float x : index.row(i)) s += static_cast<double>(x) * x;
    CHECK(std::abs(std::sqrt(s) - 1.0) < 1e-6);
  }
  CHECK(build_vector_index({}, embedder).size() == 0);
}

TEST_CASE("provider failures name the CURIE") {
  const std::vector<EntityRecord> records{record("FOODON:1", "salt"), record("FOODON:2", "poison"),
                                          record("FOODON:3", "rice")};
  try {
    build_vector_index(records, FailingEmbedder("poison"));
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(std::string(e.what()).find("FOODON:2") != std::string::npos);
  }
}

TEST_CASE("search: self similarity, k = 0 and dimension checks") {
  std::mt19937_64 rng(3);
  const auto records = t::random_corpus(rng, 50);
  const HashingEmbedder embedder;
  const auto index = build_vector_index(records, embedder);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto row = index.row(i);
    const auto hits = search_semantic(index, row, 1);
    REQUIRE(hits.size() == 1);
    CHECK(std::abs(hits[0].score - 1.0) < 1e-6);
    // Identical rows tie at 1.0 and resolve to the smaller CURIE.
    CHECK(hits[0].curie <= index.curies()[i]);
  }
  CHECK(search_semantic(index, index.row(0), 0).empty());
  const std::vector<float> wrong(10, 0.1f);
  CHECK_THROWS_AS(search_semantic(index, wrong, 3), DimensionMismatch);
}

TEST_CASE("random indexes match the exhaustive cosine oracle exactly") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t dim = 1 + rng() % 64;
    std::vector<std::string> curies;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      curies.push_back("X:" + std::to_string(rng() % 100000) + "_" + std::to_string(i));
      const auto f = t::random_unit_row(rng, dim);
      rows.emplace_back(f.begin(), f.end());
      if (i > 0 && rng() % 10 == 0) rows.back() = rows[i - 1];  // exact ties
    }
    const auto index = VectorIndex::from_rows("test", dim, curies, rows);
    std::vector<std::vector<float>> stored;
    for (std::size_t i = 0; i < index.size(); ++i) stored.emplace_back(index.row(i).begin(), index.row(i).end());
    for (int q = 0; q < 5; ++q) {
      const auto query = t::random_unit_row(rng, dim);
      const std::size_t k = rng() % (n + 3);
      const auto oracle = t::cosine_oracle(index.curies(), stored, query);
      const auto hits = search_semantic(index, query, k);
      REQUIRE(hits.size() == std::min(k, n));
      for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].curie == oracle[i].curie);
        CHECK(hits[i].score == oracle[i].score);
      }
    }
  }
}

TEST_CASE("persistence reproduces query results") {
  std::mt19937_64 rng(5);
  const auto records = t::random_corpus(rng, 40);
  const HashingEmbedder embedder(32);
  const auto index = build_vector_index(records, embedder);
  std::stringstream buf;
  index.save(buf);
  const auto bytes = buf.str();
  const auto loaded = VectorIndex::load(buf);
  CHECK(loaded.provider_name() == embedder.name());
  CHECK(loaded.curies() == index.curies());
  for (int q = 0; q < 10; ++q) {
    const auto query = embed_query(embedder, t::random_phrase(rng, 1, 3));
    CHECK(search_semantic(loaded, query, 7) == search_semantic(index, query, 7));
  }
  std::stringstream again;
  loaded.save(again);
  CHECK(again.str() == bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(VectorIndex::load(truncated), SchemaError);
  std::stringstream bad_magic("NOTANIDX");
  CHECK_THROWS_AS(VectorIndex::load(bad_magic), SchemaError);
}

TEST_CASE("from_rows validates its input") {
  CHECK_THROWS_AS(VectorIndex::from_rows("t", 2, {"A:1", "A:1"}, {{1, 0}, {0, 1}}), DuplicateCurie);
  CHECK_THROWS_AS(VectorIndex::from_rows("t", 2, {"A:1"}, {{1, 0, 0}}), DimensionMismatch);
}
