#include "ontolink/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "ontolink/errors.hpp"

namespace ontolink {

static_assert(std::endian::native == std::endian::little, "vector index persistence assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'O', 'L', 'V', 'E', 'C', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kBatch = 32;

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw SchemaError("vector index: truncated file");
  return value;
}

std::vector<float> to_unit_floats(std::vector<double> v) {
  normalize(v);
  return {v.begin(), v.end()};
}

}  // namespace

VectorIndex VectorIndex::build(std::span<const EntityRecord> records, const EmbeddingProvider& provider) {
  std::vector<const EntityRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->curie < b->curie; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->curie == sorted[i - 1]->curie) throw DuplicateCurie(sorted[i]->curie);
  }

  VectorIndex index;
  index.provider_name_ = provider.name();
  index.dimension_ = provider.dimension();
  index.curies_.reserve(sorted.size());
  index.data_.reserve(sorted.size() * index.dimension_);

  const auto check_row = [&index](const std::vector<double>& row, const std::string& curie) {
    if (row.size() != index.dimension_) {
      throw ProviderError("embedding for " + curie + " has dimension " + std::to_string(row.size()) +
                          ", expected " + std::to_string(index.dimension_));
    }
  };

  for (std::size_t start = 0; start < sorted.size(); start += kBatch) {
    const std::size_t end = std::min(sorted.size(), start + kBatch);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(embedding_text(*sorted[i]));

    std::vector<std::vector<double>> rows;
    try {
      rows = provider.embed_batch(texts);
      if (rows.size() != texts.size()) throw ProviderError("embedding batch returned the wrong number of rows");
    } catch (const ProviderError&) {
      // Retry one by one so the failure can be attributed to a concept.
      rows.clear();
      for (std::size_t i = start; i < end; ++i) {
        try {
          rows.push_back(provider.embed(texts[i - start]));
        } catch (const ProviderError& e) {
          throw ProviderError("embedding failed for " + sorted[i]->curie + ": " + e.what());
        }
      }
    }
    for (std::size_t i = start; i < end; ++i) {
      check_row(rows[i - start], sorted[i]->curie);
      const auto unit = to_unit_floats(std::move(rows[i - start]));
      index.data_.insert(index.data_.end(), unit.begin(), unit.end());
      index.curies_.push_back(sorted[i]->curie);
    }
  }
  return index;
}

VectorIndex VectorIndex::from_rows(std::string provider_name, std::size_t dimension, std::vector<std::string> curies,
                                   const std::vector<std::vector<double>>& rows) {
  if (curies.size() != rows.size()) throw std::invalid_argument("curies and rows differ in length");
  std::vector<std::size_t> order(curies.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&curies](auto a, auto b) { return curies[a] < curies[b]; });

  VectorIndex index;
  index.provider_name_ = std::move(provider_name);
  index.dimension_ = dimension;
  for (const auto i : order) {
    if (!index.curies_.empty() && index.curies_.back() == curies[i]) throw DuplicateCurie(curies[i]);
    if (rows[i].size() != dimension) throw DimensionMismatch(dimension, rows[i].size());
    const auto unit = to_unit_floats(rows[i]);
    index.data_.insert(index.data_.end(), unit.begin(), unit.end());
    index.curies_.push_back(std::move(curies[i]));
  }
  return index;
}

std::span<const float> VectorIndex::row(std::size_t i) const {
  return std::span<const float>(data_).subspan(i * dimension_, dimension_);
}

std::vector<ScoredHit> VectorIndex::search(std::span<const float> query, std::size_t k) const {
  if (query.size() != dimension_) throw DimensionMismatch(dimension_, query.size());
  if (k == 0 || curies_.empty()) return {};

  std::vector<double> scores(curies_.size());
  for (std::size_t i = 0; i < curies_.size(); ++i) {
    const float* r = data_.data() + i * dimension_;
    double dot = 0.0;
    for (std::size_t j = 0; j < dimension_; ++j) dot += static_cast<double>(query[j]) * static_cast<double>(r[j]);
    scores[i] = dot;
  }

  std::vector<std::size_t> order(curies_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : curies_[a] < curies_[b];
                    });

  std::vector<ScoredHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) hits.push_back({curies_[order[i]], scores[order[i]], std::nullopt});
  return hits;
}

void VectorIndex::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  write_pod<std::uint64_t>(out, curies_.size());
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(provider_name_.size()));
  out.write(provider_name_.data(), static_cast<std::streamsize>(provider_name_.size()));
  out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(float)));
  for (const auto& c : curies_) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.size()));
    out.write(c.data(), static_cast<std::streamsize>(c.size()));
  }
}

VectorIndex VectorIndex::load(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw SchemaError("vector index: bad magic");
  }
  if (read_pod<std::uint32_t>(in) != kVersion) throw SchemaError("vector index: unsupported version");

  VectorIndex index;
  index.dimension_ = read_pod<std::uint32_t>(in);
  const auto count = read_pod<std::uint64_t>(in);
  const auto name_len = read_pod<std::uint32_t>(in);
  if (index.dimension_ == 0) throw SchemaError("vector index: zero dimension");
  index.provider_name_.resize(name_len);
  if (!in.read(index.provider_name_.data(), name_len)) throw SchemaError("vector index: truncated file");

  index.data_.resize(count * index.dimension_);
  if (!in.read(reinterpret_cast<char*>(index.data_.data()),
               static_cast<std::streamsize>(index.data_.size() * sizeof(float)))) {
    throw SchemaError("vector index: truncated file");
  }
  index.curies_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string c(len, '\0');
    if (!in.read(c.data(), len)) throw SchemaError("vector index: truncated file");
    if (!index.curies_.empty() && !(index.curies_.back() < c)) {
      throw SchemaError("vector index: CURIEs must be unique and sorted");
    }
    index.curies_.push_back(std::move(c));
  }
  return index;
}

std::vector<float> embed_query(const EmbeddingProvider& provider, std::string_view text) {
  auto v = provider.embed(text);
  if (v.size() != provider.dimension()) throw DimensionMismatch(provider.dimension(), v.size());
  return to_unit_floats(std::move(v));
}

}  // namespace ontolink
