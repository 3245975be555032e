#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"

namespace polyalign::corpus {

enum class CorpusFormat { wikimatrix_tsv, tab_pair, moses_two_file };

CorpusFormat parse_format(std::string_view tag);
std::string_view format_name(CorpusFormat format);

/// Threshold applied to mined-corpus margin scores unless overridden.
inline constexpr double kDefaultMinQuality = 1.04;

struct SentencePair {
    std::string source_text;
    std::string target_text;
    LangCode source_lang;
    LangCode target_lang;
    std::optional<double> quality_score;
};

/// One corpus file (or, for moses_two_file, the stem of two files named
/// `<stem>.<source_lang>` and `<stem>.<target_lang>`).
struct ManifestEntry {
    std::string corpus_name;
    std::filesystem::path file_path;
    CorpusFormat format = CorpusFormat::tab_pair;
    LangCode source_lang;
    LangCode target_lang;
    std::optional<int64_t> pair_count;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;

    /// Checks name non-emptiness, distinct languages and (name, src, tgt) uniqueness.
    void validate() const;

    /// Parses {"corpora": [...]}; relative file paths resolve against base_dir.
    static CorpusManifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static CorpusManifest load(const std::filesystem::path& manifest_file);
};

struct LoadOptions {
    /// Pairs with a quality score below this are dropped; nullopt disables the filter.
    std::optional<double> min_quality = kDefaultMinQuality;
};

struct LoadCounters {
    int64_t lines = 0;
    int64_t malformed = 0;
    int64_t below_quality = 0;
    int64_t yielded = 0;
};

/// Streams pairs from one manifest entry in file order. Malformed lines are
/// counted and skipped; when the stream ends with more than half of its lines
/// malformed, next() throws CorruptInputError.
class CorpusReader {
public:
    CorpusReader(const ManifestEntry& entry, LoadOptions options);
    ~CorpusReader();
    CorpusReader(CorpusReader&&) noexcept;
    CorpusReader& operator=(CorpusReader&&) noexcept;

    std::optional<SentencePair> next();
    const LoadCounters& counters() const { return counters_; }
    const ManifestEntry& entry() const { return entry_; }

private:
    struct Source;

    std::optional<SentencePair> parse_line(const std::string& line);
    std::optional<SentencePair> make_pair(std::string_view source, std::string_view target,
                                          std::optional<double> score);

    ManifestEntry entry_;
    LoadOptions options_;
    LoadCounters counters_;
    std::unique_ptr<Source> source_;
    bool finished_ = false;
};

struct LoadedCorpus {
    std::vector<SentencePair> pairs;
    LoadCounters counters;
};

LoadedCorpus load_corpus(const ManifestEntry& entry, const LoadOptions& options = {});

/// Whitespace-only key normalization: trim + collapse internal runs.
std::string dedup_key(const SentencePair& pair);

/// Keeps the first occurrence of each normalized (source, target). A disabled
/// deduplicator admits everything and holds no key set.
class Deduplicator {
public:
    explicit Deduplicator(bool enabled = true) : enabled_(enabled) {}

    bool admit(const SentencePair& pair);
    bool enabled() const { return enabled_; }
    int64_t duplicates() const { return duplicates_; }

private:
    bool enabled_;
    int64_t duplicates_ = 0;
    std::unordered_set<std::string> seen_;
};

std::vector<SentencePair> dedup(std::vector<SentencePair> pairs);

struct StatsOptions {
    LoadOptions load;
    bool dedup = true;
    unsigned workers = 1;
};

struct CorpusStatsRow {
    std::string corpus_name;
    LangCode source_lang;
    LangCode target_lang;
    /// Language the row is totalled under: the non-English side.
    LangCode counted_lang;
    LoadCounters counters;
    int64_t duplicates = 0;
    int64_t pair_count = 0;
    std::optional<int64_t> declared;
};

struct CorpusStats {
    std::vector<CorpusStatsRow> rows;
    std::map<LangCode, int64_t> total_per_lang;
    bool dedup_enabled = true;
    std::optional<double> min_quality;

    bool filters_off() const { return !dedup_enabled && !min_quality; }
};

/// Loads, filters and deduplicates every entry (entries are independent and
/// may run on `workers` threads). With all filters off a declared pair_count
/// must match exactly, otherwise InputError.
CorpusStats corpus_stats(const CorpusManifest& manifest, const StatsOptions& options = {});

std::string stats_to_tsv(const CorpusStats& stats);
nlohmann::json stats_to_json(const CorpusStats& stats);

}  // namespace polyalign::corpus
