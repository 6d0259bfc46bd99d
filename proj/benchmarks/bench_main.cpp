#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ontolink/embedding.hpp"
#include "ontolink/ingest.hpp"
#include "ontolink/lexical_index.hpp"
#include "ontolink/ntriples.hpp"
#include "ontolink/retriever.hpp"
#include "ontolink/vector_index.hpp"

using namespace ontolink;

namespace {

const std::vector<std::string>& words() {
  static const std::vector<std::string> w{"wheat", "flour", "whole", "rice", "bread", "pita", "salt", "sugar",
                                          "brown", "olive", "oil", "lemon", "juice", "cheese", "milk", "egg",
                                          "beef", "garlic", "onion", "tomato", "walnut", "chickpea", "yoghurt",
                                          "butter", "corn", "bean", "pepper", "honey", "apple", "pork"};
  return w;
}

std::string phrase(std::mt19937_64& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += words()[rng() % words().size()];
  }
  return s;
}

std::vector<EntityRecord> corpus(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<EntityRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    EntityRecord r;
    r.curie = "FOODON:" + std::to_string(10000000 + i);
    r.label = phrase(rng, 1 + static_cast<int>(rng() % 4));
    r.synonyms = {phrase(rng, 2)};
    r.definition = phrase(rng, 8);
    out.push_back(std::move(r));
  }
  return out;
}

void BM_lexical_search(benchmark::State& state) {
  const auto records = corpus(static_cast<std::size_t>(state.range(0)));
  const auto index = LexicalIndex::build(records);
  std::mt19937_64 rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(index.search(phrase(rng, 3), 15));
}
BENCHMARK(BM_lexical_search)->Arg(1000)->Arg(10000);

void BM_knn_search(benchmark::State& state) {
  const auto records = corpus(static_cast<std::size_t>(state.range(0)));
  const HashingEmbedder embedder;
  const auto index = VectorIndex::build(records, embedder);
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    const auto q = embed_query(embedder, phrase(rng, 3));
    benchmark::DoNotOptimize(index.search(q, 15));
  }
}
BENCHMARK(BM_knn_search)->Arg(1000)->Arg(10000);

void BM_retrieve_toy(benchmark::State& state) {
  std::ifstream in(std::string(ONTOLINK_BENCH_DATA_DIR) + "/toy_ontology.nt", std::ios::binary);
  const RecordStore store(extract_entities(parse_graph(in), IngestConfig::foodon_defaults()).records);
  const auto lexical = LexicalIndex::build(store.records());
  const HashingEmbedder embedder;
  const auto vectors = VectorIndex::build(store.records(), embedder);
  const RetrievalIndexes indexes{store, lexical, vectors, embedder};
  const RetrievalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(retrieve({"whole wheat flour", std::nullopt}, indexes, cfg));
}
BENCHMARK(BM_retrieve_toy);

}  // namespace

BENCHMARK_MAIN();
