#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "polyalign/common.hpp"

namespace polyalign {

struct EmbeddingRecord {
    LangCode lang;
    int64_t sentence_id = 0;
    std::vector<double> vector;
    std::optional<int64_t> layer;
};

/// Externally produced sentence embeddings, one JSON object per line:
/// {"lang": "zh", "sentence_id": 3, "vector": [...], "layer": 12}
/// ("layer" is optional and only read by the representation-space tools).
struct EmbeddingDump {
    std::vector<EmbeddingRecord> records;

    size_t dimension() const { return records.empty() ? 0 : records.front().vector.size(); }

    /// Shared dimension >= 2, finite components, unique (lang, sentence_id)
    /// within each layer.
    void validate() const;

    static EmbeddingDump read_jsonl(std::istream& in);
    static EmbeddingDump load(const std::filesystem::path& path);

    /// sentence_id -> vector for one language.
    std::map<int64_t, std::span<const double>> by_id(const LangCode& lang) const;
};

/// Cosine of two equal-length vectors; DomainError on a zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace polyalign
