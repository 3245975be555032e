#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/embeddings.hpp"

namespace polyalign::rep {

/// Embeddings of one model layer, multi-way over sentence ids.
struct LayerDump {
    int64_t layer_index = 0;
    EmbeddingDump records;

    /// One layer index throughout, at least two languages, valid dump.
    void validate() const;
    std::vector<LangCode> languages() const;
};

/// Splits a dump by its "layer" field (records without one go to layer 0).
std::vector<LayerDump> split_layers(const EmbeddingDump& dump);

struct AlignmentScore {
    LangCode pivot;
    std::map<LangCode, double> per_lang;
    std::map<LangCode, int64_t> shared_ids;
    double overall = 0.0;
};

/// Mean cosine to the pivot over shared ids for every other language;
/// overall is the unweighted mean over languages.
AlignmentScore alignment_score(const LayerDump& dump, const LangCode& pivot = kEnglish);

/// Leave-one-out k-nearest-neighbour language identification accuracy under
/// cosine distance. Distance ties: lower sentence_id, then smaller lang.
/// Vote ties: smaller lang.
double separability(const LayerDump& dump, int k);

struct Point2d {
    LangCode lang;
    int64_t sentence_id = 0;
    double x = 0.0;
    double y = 0.0;
};

struct Projection {
    std::vector<Point2d> points;
    /// Principal axes (d x 2, column major by axis) and their variances.
    std::vector<double> axis_1;
    std::vector<double> axis_2;
    double variance_1 = 0.0;
    double variance_2 = 0.0;
    /// All vectors identical: every point is (0, 0).
    bool degenerate = false;
};

/// PCA onto the top two principal components of the mean-centred vectors.
/// Each axis is signed so its largest-magnitude loading is positive.
Projection project_2d(const LayerDump& dump);

/// "lang\tsentence_id\tx\ty" rows with a header, %.17g numbers.
void write_projection_tsv(std::ostream& out, const Projection& projection);

struct LayerReport {
    int64_t layer_index = 0;
    AlignmentScore alignment;
    double separability = 0.0;
    int k = 0;
    Projection projection;
};

/// Layers are processed concurrently (up to `workers` at once).
std::vector<LayerReport> analyze_layers(const EmbeddingDump& dump, const LangCode& pivot, int k, unsigned workers = 1);

nlohmann::json to_json(const LayerReport& report);

}  // namespace polyalign::rep
