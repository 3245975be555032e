#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"

namespace polyalign::eval {

struct QAItem {
    std::string id;
    std::string context;
    std::string question;
    std::string reference_answer;
    std::string hypothesis;
    std::string lang;
};

/// One JSON object per line with the QAItem field names.
std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path);

struct ItemScore {
    std::string id;
    double score = 0.0;
    friend bool operator==(const ItemScore&, const ItemScore&) = default;
};

struct Significance {
    std::string baseline_name;
    double p_value = 1.0;
    int64_t n_resamples = 0;
    uint64_t seed = 0;
    friend bool operator==(const Significance&, const Significance&) = default;
};

struct EvalReport {
    std::string metric_name;
    std::vector<ItemScore> per_item;
    double aggregate = 0.0;
    int64_t n = 0;
    std::optional<Significance> significance;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

nlohmann::json to_json(const EvalReport& report);

/// trim, collapse whitespace, lowercase (Unicode simple case mapping), then
/// strip trailing . 。 ؟ ? ! ; (and whitespace between them).
std::string normalize_answer(std::string_view s);

/// 1 per item when normalized hypothesis equals normalized reference; aggregate is the mean.
EvalReport exact_match(std::span<const QAItem> items);

enum class Tokenizer { whitespace, character, external_subword };
Tokenizer parse_tokenizer(std::string_view tag);
std::string_view tokenizer_name(Tokenizer t);

struct BleuOptions {
    Tokenizer tokenizer = Tokenizer::whitespace;
    /// Replaces a zero match count by this value (0 = no smoothing).
    double smoothing_epsilon = 0.0;
};

/// Sufficient statistics of one or more segments.
struct BleuStats {
    int64_t hyp_len = 0;
    int64_t ref_len = 0;
    int64_t matches[4] = {0, 0, 0, 0};
    int64_t totals[4] = {0, 0, 0, 0};

    BleuStats& operator+=(const BleuStats& other);
    /// Geometric mean of modified 1..4-gram precisions times the brevity
    /// penalty, in [0, 100].
    double score(double smoothing_epsilon = 0.0) const;
};

BleuStats bleu_stats(const std::vector<std::string>& hyp_tokens, const std::vector<std::string>& ref_tokens);
std::vector<std::string> tokenize(std::string_view s, Tokenizer tokenizer);

/// Corpus BLEU (aggregate) with sentence-level BLEU per item. For
/// external_subword the inputs are already space-separated subword pieces.
EvalReport bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                const BleuOptions& options = {});

struct BootstrapResult {
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    int64_t n_resamples = 0;
    uint64_t seed = 0;
    /// Set when system A does not beat B on the full data.
    std::string note;
};

/// One-sided paired bootstrap: resample item indices with replacement
/// (documented Prng stream), p = fraction of resamples where sum(a - b) <= 0.
/// Requires equal lengths >= 2 and n_resamples >= 100.
BootstrapResult paired_bootstrap(std::span<const double> system_a, std::span<const double> system_b,
                                 int64_t n_resamples, uint64_t seed);

/// Attaches a bootstrap p-value of `report` against `baseline` (matched by item order).
EvalReport with_significance(EvalReport report, const EvalReport& baseline, const std::string& baseline_name,
                             int64_t n_resamples, uint64_t seed);

/// Wraps an "id<TAB>score" file of externally computed learned-metric
/// scores. An optional "id<TAB>score" header line is skipped.
EvalReport ingest_external_scores(const std::filesystem::path& path, const std::string& metric_name);

}  // namespace polyalign::eval
