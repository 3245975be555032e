#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"
#include "polyalign/corpus.hpp"

namespace polyalign::data {

enum class Task { general, translation };
enum class Direction { en_to_x, x_to_en };
/// Per-language direction setting; both_split gives ceil(n/2) to en_to_x.
enum class DirectionPlan { en_to_x, x_to_en, both_split };

std::string_view task_name(Task task);
std::string_view direction_name(Direction direction);
DirectionPlan parse_direction_plan(std::string_view tag);
std::string_view direction_plan_name(DirectionPlan plan);

struct RecordMeta {
    Task task = Task::general;
    LangCode lang;
    std::optional<Direction> direction;
    /// Provenance label the record is counted under.
    std::string source;
};

/// {instruction, input, output} plus metadata kept out of the trainer file.
struct InstructionRecord {
    std::string instruction;
    std::string input;
    std::string output;
    RecordMeta meta;

    void validate() const;
};

struct ProvenanceEntry {
    std::string source;
    int64_t count = 0;
};

struct InstructionDataset {
    std::vector<InstructionRecord> records;
    uint64_t seed = 0;
    std::vector<ProvenanceEntry> provenance;

    /// Record invariants hold and provenance counts sum to the record count.
    void validate() const;
};

/// "Translate the following sentences from <SRC> to <TGT>." with English names.
std::string translation_instruction(const LangCode& source, const LangCode& target);

/// Samples `count` distinct pairs (after orienting every pair as
/// English/foreign and deduplicating) and formats them as translation
/// records. All pairs must share one foreign language and have an English
/// side. Throws InputError when count exceeds the available pairs.
std::vector<InstructionRecord> build_translation_records(std::span<const corpus::SentencePair> pairs,
                                                         DirectionPlan plan, size_t count, uint64_t seed);

/// One row of a stanford_alpaca style JSON file.
struct AlpacaRow {
    std::string instruction;
    std::string input;
    std::string output;
};

std::vector<AlpacaRow> read_alpaca_json(const std::filesystem::path& path);

struct GeneralSource {
    LangCode lang;
    std::filesystem::path file_path;
};

/// Records for every source, in source order. All files must have the same
/// number of rows (translations are row-aligned with the English seed).
std::vector<InstructionRecord> build_general_records(std::span<const GeneralSource> sources);

/// English seed plus row-aligned translated versions.
std::vector<InstructionRecord> build_general_records(const std::filesystem::path& seed_file,
                                                     const std::map<LangCode, std::filesystem::path>& translated);

struct MixRecipe {
    std::vector<GeneralSource> general_sources;
    std::map<LangCode, int64_t> translation_amounts;
    std::map<LangCode, DirectionPlan> directions;
    uint64_t seed = 0;

    /// {"seed", "general_sources": [{"lang","file_path"}],
    ///  "translation_amounts": {lang: n}, "directions": {lang: "en_to_x"|...}}
    static MixRecipe from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

struct MixOptions {
    corpus::LoadOptions load;
};

/// General records plus sampled translation records, shuffled with the
/// recipe seed. Translation pairs for a language come from every manifest
/// entry pairing it with English, in manifest order.
InstructionDataset mix(const MixRecipe& recipe, const corpus::CorpusManifest& corpora, const MixOptions& options = {});

struct DatasetFiles {
    std::filesystem::path train;
    std::filesystem::path meta;
    std::filesystem::path provenance;
};

/// Writes train.json (alpaca array), meta.jsonl (one line per record) and
/// provenance.json into out_dir.
DatasetFiles write_dataset(const InstructionDataset& dataset, const std::filesystem::path& out_dir);

/// Multi-way instruction evaluation set: English seed plus one column per language.
struct MiEvalSet {
    std::vector<LangCode> langs;
    struct Row {
        int64_t id = 0;
        std::string en;
        std::vector<std::string> translations;
        friend bool operator==(const Row&, const Row&) = default;
    };
    std::vector<Row> rows;

    friend bool operator==(const MiEvalSet&, const MiEvalSet&) = default;
};

MiEvalSet build_mi_eval(std::span<const std::string> seed_instructions,
                        const std::map<LangCode, std::vector<std::string>>& translations);

/// Header "id\ten\t<lang>..." then one escaped row per item.
void write_mi_eval_tsv(std::ostream& out, const MiEvalSet& set);
MiEvalSet read_mi_eval_tsv(std::istream& in);

/// One instruction per line, TSV-escaped.
std::vector<std::string> read_lines_file(const std::filesystem::path& path);

}  // namespace polyalign::data
