#include "polyalign/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "polyalign/prng.hpp"
#include "polyalign/text.hpp"

namespace polyalign::data {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string_view task_name(Task task) { return task == Task::general ? "general" : "translation"; }

std::string_view direction_name(Direction direction) {
    return direction == Direction::en_to_x ? "en_to_x" : "x_to_en";
}

DirectionPlan parse_direction_plan(std::string_view tag) {
    if (tag == "en_to_x") return DirectionPlan::en_to_x;
    if (tag == "x_to_en") return DirectionPlan::x_to_en;
    if (tag == "both_split") return DirectionPlan::both_split;
    throw ConfigError("unknown translation direction '" + std::string(tag) + "'");
}

std::string_view direction_plan_name(DirectionPlan plan) {
    switch (plan) {
        case DirectionPlan::en_to_x: return "en_to_x";
        case DirectionPlan::x_to_en: return "x_to_en";
        case DirectionPlan::both_split: return "both_split";
    }
    return "unknown";
}

void InstructionRecord::validate() const {
    if (instruction.empty()) throw InputError("instruction record with empty instruction");
    if (output.empty()) throw InputError("instruction record with empty output");
    if ((meta.task == Task::translation) != meta.direction.has_value())
        throw InputError("translation records need a direction and general records must not have one");
}

void InstructionDataset::validate() const {
    int64_t total = 0;
    for (const auto& p : provenance) total += p.count;
    if (total != static_cast<int64_t>(records.size()))
        throw InputError("provenance counts sum to " + std::to_string(total) + " but the dataset has " +
                         std::to_string(records.size()) + " records");
    for (const auto& r : records) r.validate();
}

std::string translation_instruction(const LangCode& source, const LangCode& target) {
    return "Translate the following sentences from " + english_name(source) + " to " + english_name(target) + ".";
}

namespace {

struct OrientedPair {
    std::string english;
    std::string foreign;
};

std::string source_label(Direction d, const LangCode& foreign) {
    return d == Direction::en_to_x ? "translation:en->" + foreign.str() : "translation:" + foreign.str() + "->en";
}

InstructionRecord make_translation_record(const OrientedPair& p, Direction d, const LangCode& foreign) {
    InstructionRecord r;
    if (d == Direction::en_to_x) {
        r.instruction = translation_instruction(kEnglish, foreign);
        r.input = p.english;
        r.output = p.foreign;
    } else {
        r.instruction = translation_instruction(foreign, kEnglish);
        r.input = p.foreign;
        r.output = p.english;
    }
    r.meta = RecordMeta{Task::translation, foreign, d, source_label(d, foreign)};
    return r;
}

}  // namespace

std::vector<InstructionRecord> build_translation_records(std::span<const corpus::SentencePair> pairs,
                                                         DirectionPlan plan, size_t count, uint64_t seed) {
    if (count == 0) return {};
    std::optional<LangCode> foreign;
    std::vector<OrientedPair> oriented;
    std::unordered_set<std::string> seen;
    for (const auto& p : pairs) {
        OrientedPair o;
        LangCode lang;
        if (p.source_lang == kEnglish) {
            o = {p.source_text, p.target_text};
            lang = p.target_lang;
        } else if (p.target_lang == kEnglish) {
            o = {p.target_text, p.source_text};
            lang = p.source_lang;
        } else {
            throw InputError("translation pair " + p.source_lang.str() + "-" + p.target_lang.str() +
                             " has no English side");
        }
        if (!foreign) foreign = lang;
        if (*foreign != lang)
            throw InputError("translation pairs mix languages " + foreign->str() + " and " + lang.str());
        std::string key = text::collapse_whitespace(o.english) + '\x1f' + text::collapse_whitespace(o.foreign);
        if (seen.insert(std::move(key)).second) oriented.push_back(std::move(o));
    }
    if (count > oriented.size())
        throw InputError("requested " + std::to_string(count) + " translation pairs but only " +
                         std::to_string(oriented.size()) + " distinct pairs are available");
    english_name(*foreign);  // fail early on an unnamed language

    Prng rng(seed);
    const auto picked = rng.sample_indices(oriented.size(), count);
    size_t en_to_x = 0;
    switch (plan) {
        case DirectionPlan::en_to_x: en_to_x = count; break;
        case DirectionPlan::x_to_en: en_to_x = 0; break;
        case DirectionPlan::both_split: en_to_x = (count + 1) / 2; break;
    }
    std::vector<InstructionRecord> records;
    records.reserve(count);
    for (size_t k = 0; k < picked.size(); ++k) {
        const auto d = k < en_to_x ? Direction::en_to_x : Direction::x_to_en;
        records.push_back(make_translation_record(oriented[picked[k]], d, *foreign));
    }
    return records;
}

std::vector<AlpacaRow> read_alpaca_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read instruction file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(path.string() + " is not valid JSON: " + ex.what());
    }
    if (!j.is_array()) throw InputError(path.string() + " must hold a JSON array of instruction objects");
    std::vector<AlpacaRow> rows;
    rows.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& item = j[i];
        try {
            rows.push_back({item.at("instruction").get<std::string>(), item.value("input", std::string()),
                            item.at("output").get<std::string>()});
        } catch (const nlohmann::json::exception& ex) {
            throw InputError(path.string() + " row " + std::to_string(i) + ": " + ex.what());
        }
    }
    return rows;
}

std::vector<InstructionRecord> build_general_records(std::span<const GeneralSource> sources) {
    std::vector<InstructionRecord> records;
    std::optional<size_t> rows_expected;
    std::string reference;
    for (const auto& src : sources) {
        const auto rows = read_alpaca_json(src.file_path);
        if (!rows_expected) {
            rows_expected = rows.size();
            reference = src.file_path.string();
        } else if (rows.size() != *rows_expected) {
            throw InputError(src.file_path.string() + " has " + std::to_string(rows.size()) + " rows but " +
                             reference + " has " + std::to_string(*rows_expected) + "; files must be row-aligned");
        }
        for (size_t i = 0; i < rows.size(); ++i) {
            InstructionRecord r{rows[i].instruction, rows[i].input, rows[i].output,
                                RecordMeta{Task::general, src.lang, std::nullopt, "general:" + src.lang.str()}};
            if (r.instruction.empty() || r.output.empty())
                throw InputError(src.file_path.string() + " row " + std::to_string(i) +
                                 " has an empty instruction or output");
            records.push_back(std::move(r));
        }
    }
    return records;
}

std::vector<InstructionRecord> build_general_records(const fs::path& seed_file,
                                                     const std::map<LangCode, fs::path>& translated) {
    std::vector<GeneralSource> sources{{kEnglish, seed_file}};
    for (const auto& [lang, path] : translated) sources.push_back({lang, path});
    return build_general_records(sources);
}

MixRecipe MixRecipe::from_json(const nlohmann::json& j, const fs::path& base_dir) {
    MixRecipe r;
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    try {
        r.seed = j.at("seed").get<uint64_t>();
        const auto general = j.value("general_sources", nlohmann::json::array());
        for (const auto& g : general) {
            r.general_sources.push_back(
                {LangCode(g.at("lang").get<std::string>()), resolve(g.at("file_path").get<std::string>())});
        }
        const auto amounts = j.value("translation_amounts", nlohmann::json::object());
        for (const auto& [lang, amount] : amounts.items()) {
            const auto n = amount.get<int64_t>();
            if (n < 0) throw ConfigError("translation amount for " + lang + " is negative");
            r.translation_amounts[LangCode(lang)] = n;
        }
        const auto directions = j.value("directions", nlohmann::json::object());
        for (const auto& [lang, dir] : directions.items()) {
            r.directions[LangCode(lang)] = parse_direction_plan(dir.get<std::string>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad mix recipe: ") + ex.what());
    } catch (const InputError& ex) {
        throw ConfigError(std::string("bad mix recipe: ") + ex.what());
    }
    return r;
}

InstructionDataset mix(const MixRecipe& recipe, const corpus::CorpusManifest& corpora, const MixOptions& options) {
    InstructionDataset dataset;
    dataset.seed = recipe.seed;
    auto records = build_general_records(recipe.general_sources);

    for (const auto& [lang, amount] : recipe.translation_amounts) {
        if (amount == 0) continue;
        if (lang == kEnglish) throw ConfigError("translation amounts are keyed by the non-English language");
        std::vector<corpus::SentencePair> pairs;
        bool found = false;
        for (const auto& entry : corpora.entries) {
            const bool matches = (entry.source_lang == kEnglish && entry.target_lang == lang) ||
                                 (entry.target_lang == kEnglish && entry.source_lang == lang);
            if (!matches) continue;
            found = true;
            auto loaded = corpus::load_corpus(entry, options.load);
            std::move(loaded.pairs.begin(), loaded.pairs.end(), std::back_inserter(pairs));
        }
        if (!found) throw InputError("no corpus pairs English with " + lang.str());
        const auto it = recipe.directions.find(lang);
        const auto plan = it == recipe.directions.end() ? DirectionPlan::en_to_x : it->second;
        auto translated = build_translation_records(pairs, plan, static_cast<size_t>(amount),
                                                    derive_seed(recipe.seed, "translation:" + lang.str()));
        std::move(translated.begin(), translated.end(), std::back_inserter(records));
    }

    for (const auto& r : records) {
        auto it = std::find_if(dataset.provenance.begin(), dataset.provenance.end(),
                               [&](const ProvenanceEntry& p) { return p.source == r.meta.source; });
        if (it == dataset.provenance.end()) {
            dataset.provenance.push_back({r.meta.source, 1});
        } else {
            ++it->count;
        }
    }

    Prng rng(recipe.seed);
    rng.shuffle(std::span<InstructionRecord>(records));
    dataset.records = std::move(records);
    dataset.validate();
    return dataset;
}

DatasetFiles write_dataset(const InstructionDataset& dataset, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    DatasetFiles files{out_dir / "train.json", out_dir / "meta.jsonl", out_dir / "provenance.json"};
    constexpr auto handler = nlohmann::json::error_handler_t::replace;

    ordered_json train = ordered_json::array();
    for (const auto& r : dataset.records) {
        train.push_back(ordered_json{{"instruction", r.instruction}, {"input", r.input}, {"output", r.output}});
    }
    {
        std::ofstream out(files.train, std::ios::binary);
        out << train.dump(2, ' ', false, handler) << '\n';
        if (!out) throw InputError("cannot write " + files.train.string());
    }
    {
        std::ofstream out(files.meta, std::ios::binary);
        for (size_t i = 0; i < dataset.records.size(); ++i) {
            const auto& m = dataset.records[i].meta;
            ordered_json line{{"index", i},
                              {"task", task_name(m.task)},
                              {"lang", m.lang.str()},
                              {"direction", m.direction ? ordered_json(direction_name(*m.direction)) : ordered_json()},
                              {"source", m.source}};
            out << line.dump(-1, ' ', false, handler) << '\n';
        }
        if (!out) throw InputError("cannot write " + files.meta.string());
    }
    {
        ordered_json prov = ordered_json::array();
        for (const auto& p : dataset.provenance) prov.push_back(ordered_json{{"source", p.source}, {"count", p.count}});
        ordered_json doc{{"seed", dataset.seed},
                         {"prng", kPrngVersion},
                         {"total", dataset.records.size()},
                         {"provenance", prov}};
        std::ofstream out(files.provenance, std::ios::binary);
        out << doc.dump(2) << '\n';
        if (!out) throw InputError("cannot write " + files.provenance.string());
    }
    return files;
}

MiEvalSet build_mi_eval(std::span<const std::string> seeds,
                        const std::map<LangCode, std::vector<std::string>>& translations) {
    MiEvalSet set;
    for (const auto& [lang, rows] : translations) {
        if (rows.size() != seeds.size())
            throw InputError("translations for " + lang.str() + " have " + std::to_string(rows.size()) +
                             " rows but there are " + std::to_string(seeds.size()) + " seed instructions");
        set.langs.push_back(lang);
    }
    for (size_t i = 0; i < seeds.size(); ++i) {
        MiEvalSet::Row row;
        row.id = static_cast<int64_t>(i);
        row.en = seeds[i];
        for (const auto& [lang, rows] : translations) row.translations.push_back(rows[i]);
        set.rows.push_back(std::move(row));
    }
    return set;
}

void write_mi_eval_tsv(std::ostream& out, const MiEvalSet& set) {
    out << "id\ten";
    for (const auto& l : set.langs) out << '\t' << l.str();
    out << '\n';
    for (const auto& row : set.rows) {
        out << row.id << '\t' << text::tsv_escape(row.en);
        for (const auto& t : row.translations) out << '\t' << text::tsv_escape(t);
        out << '\n';
    }
}

MiEvalSet read_mi_eval_tsv(std::istream& in) {
    MiEvalSet set;
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty MI-Eval file");
    const auto header = text::split_tabs(text::chomp_cr(line));
    if (header.size() < 2 || header[0] != "id" || header[1] != "en")
        throw InputError("MI-Eval header must start with id<TAB>en");
    for (size_t i = 2; i < header.size(); ++i) set.langs.emplace_back(std::string(header[i]));
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = text::split_tabs(text::chomp_cr(line));
        if (fields.size() != header.size())
            throw InputError("MI-Eval line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                             " columns, expected " + std::to_string(header.size()));
        MiEvalSet::Row row;
        try {
            row.id = std::stoll(std::string(fields[0]));
        } catch (const std::exception&) {
            throw InputError("MI-Eval line " + std::to_string(lineno) + " has a non-integer id");
        }
        row.en = text::tsv_unescape(fields[1]);
        for (size_t i = 2; i < fields.size(); ++i) row.translations.push_back(text::tsv_unescape(fields[i]));
        set.rows.push_back(std::move(row));
    }
    return set;
}

std::vector<std::string> read_lines_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(text::tsv_unescape(text::chomp_cr(line)));
    return lines;
}

}  // namespace polyalign::data
