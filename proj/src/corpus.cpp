#include "polyalign/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "polyalign/text.hpp"

namespace polyalign::corpus {

namespace fs = std::filesystem;

CorpusFormat parse_format(std::string_view tag) {
    if (tag == "wikimatrix_tsv") return CorpusFormat::wikimatrix_tsv;
    if (tag == "tab_pair") return CorpusFormat::tab_pair;
    if (tag == "moses_two_file") return CorpusFormat::moses_two_file;
    throw InputError("unknown corpus format '" + std::string(tag) + "'");
}

std::string_view format_name(CorpusFormat format) {
    switch (format) {
        case CorpusFormat::wikimatrix_tsv: return "wikimatrix_tsv";
        case CorpusFormat::tab_pair: return "tab_pair";
        case CorpusFormat::moses_two_file: return "moses_two_file";
    }
    return "unknown";
}

void CorpusManifest::validate() const {
    std::set<std::tuple<std::string, LangCode, LangCode>> seen;
    for (const auto& e : entries) {
        if (e.corpus_name.empty()) throw InputError("manifest entry with empty corpus_name");
        if (e.source_lang == e.target_lang)
            throw InputError("corpus '" + e.corpus_name + "' has identical source and target language");
        if (!seen.emplace(e.corpus_name, e.source_lang, e.target_lang).second)
            throw InputError("duplicate manifest entry '" + e.corpus_name + "' " + e.source_lang.str() + "-" +
                             e.target_lang.str());
        if (e.pair_count && *e.pair_count < 0)
            throw InputError("corpus '" + e.corpus_name + "' declares a negative pair_count");
    }
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j, const fs::path& base_dir) {
    CorpusManifest m;
    if (!j.is_object() || !j.contains("corpora") || !j["corpora"].is_array())
        throw InputError("corpus manifest must be an object with a \"corpora\" array");
    for (const auto& item : j["corpora"]) {
        ManifestEntry e;
        try {
            e.corpus_name = item.at("corpus_name").get<std::string>();
            fs::path p = item.at("file_path").get<std::string>();
            e.file_path = p.is_absolute() ? p : base_dir / p;
            e.format = parse_format(item.at("format").get<std::string>());
            e.source_lang = LangCode(item.at("source_lang").get<std::string>());
            e.target_lang = LangCode(item.at("target_lang").get<std::string>());
            if (item.contains("pair_count") && !item["pair_count"].is_null())
                e.pair_count = item["pair_count"].get<int64_t>();
        } catch (const nlohmann::json::exception& ex) {
            throw InputError(std::string("bad corpus manifest entry: ") + ex.what());
        }
        m.entries.push_back(std::move(e));
    }
    m.validate();
    return m;
}

CorpusManifest CorpusManifest::load(const fs::path& manifest_file) {
    std::ifstream in(manifest_file);
    if (!in) throw InputError("cannot open corpus manifest " + manifest_file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw InputError("corpus manifest " + manifest_file.string() + " is not valid JSON: " + ex.what());
    }
    return from_json(j, manifest_file.parent_path());
}

struct CorpusReader::Source {
    std::ifstream primary;
    std::ifstream secondary;  // target side of moses_two_file
};

namespace {

std::ifstream open_or_throw(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read corpus file " + path.string());
    return in;
}

fs::path moses_side(const fs::path& stem, const LangCode& lang) {
    return fs::path(stem.string() + "." + lang.str());
}

std::optional<double> parse_score(std::string_view field) {
    field = text::trim(field);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

CorpusReader::CorpusReader(const ManifestEntry& entry, LoadOptions options)
    : entry_(entry), options_(options), source_(std::make_unique<Source>()) {
    if (entry_.format == CorpusFormat::moses_two_file) {
        source_->primary = open_or_throw(moses_side(entry_.file_path, entry_.source_lang));
        source_->secondary = open_or_throw(moses_side(entry_.file_path, entry_.target_lang));
    } else {
        source_->primary = open_or_throw(entry_.file_path);
    }
}

CorpusReader::~CorpusReader() = default;
CorpusReader::CorpusReader(CorpusReader&&) noexcept = default;
CorpusReader& CorpusReader::operator=(CorpusReader&&) noexcept = default;

std::optional<SentencePair> CorpusReader::make_pair(std::string_view source, std::string_view target,
                                                    std::optional<double> score) {
    source = text::trim(source);
    target = text::trim(target);
    if (source.empty() || target.empty()) {
        ++counters_.malformed;
        return std::nullopt;
    }
    if (score && options_.min_quality && *score < *options_.min_quality) {
        ++counters_.below_quality;
        return std::nullopt;
    }
    ++counters_.yielded;
    return SentencePair{std::string(source), std::string(target), entry_.source_lang, entry_.target_lang, score};
}

std::optional<SentencePair> CorpusReader::parse_line(const std::string& raw) {
    const auto line = text::chomp_cr(raw);
    const auto fields = text::split_tabs(line);
    if (entry_.format == CorpusFormat::wikimatrix_tsv) {
        if (fields.size() != 3) {
            ++counters_.malformed;
            return std::nullopt;
        }
        const auto score = parse_score(fields[0]);
        if (!score) {
            ++counters_.malformed;
            return std::nullopt;
        }
        return make_pair(fields[1], fields[2], score);
    }
    if (fields.size() != 2) {
        ++counters_.malformed;
        return std::nullopt;
    }
    return make_pair(fields[0], fields[1], std::nullopt);
}

std::optional<SentencePair> CorpusReader::next() {
    if (finished_) return std::nullopt;
    std::string line;
    std::string other;
    while (true) {
        if (entry_.format == CorpusFormat::moses_two_file) {
            const bool has_src = static_cast<bool>(std::getline(source_->primary, line));
            const bool has_tgt = static_cast<bool>(std::getline(source_->secondary, other));
            if (!has_src && !has_tgt) break;
            ++counters_.lines;
            if (has_src != has_tgt) {
                // one side ran out: the dangling line has no partner
                ++counters_.malformed;
                continue;
            }
            if (line.find('\t') != std::string::npos || other.find('\t') != std::string::npos) {
                ++counters_.malformed;
                continue;
            }
            if (auto pair = make_pair(text::chomp_cr(line), text::chomp_cr(other), std::nullopt)) return pair;
        } else {
            if (!std::getline(source_->primary, line)) break;
            ++counters_.lines;
            if (auto pair = parse_line(line)) return pair;
        }
    }
    finished_ = true;
    if (counters_.malformed * 2 > counters_.lines) {
        std::ostringstream msg;
        msg << "corpus '" << entry_.corpus_name << "' (" << entry_.file_path.string() << "): "
            << counters_.malformed << " of " << counters_.lines << " lines are malformed";
        throw CorruptInputError(msg.str());
    }
    return std::nullopt;
}

LoadedCorpus load_corpus(const ManifestEntry& entry, const LoadOptions& options) {
    CorpusReader reader(entry, options);
    LoadedCorpus out;
    while (auto pair = reader.next()) out.pairs.push_back(std::move(*pair));
    out.counters = reader.counters();
    return out;
}

std::string dedup_key(const SentencePair& pair) {
    std::string key = text::collapse_whitespace(pair.source_text);
    key.push_back('\x1f');
    key += text::collapse_whitespace(pair.target_text);
    return key;
}

bool Deduplicator::admit(const SentencePair& pair) {
    if (!enabled_) return true;
    if (seen_.insert(dedup_key(pair)).second) return true;
    ++duplicates_;
    return false;
}

std::vector<SentencePair> dedup(std::vector<SentencePair> pairs) {
    Deduplicator d;
    std::vector<SentencePair> out;
    out.reserve(pairs.size());
    for (auto& p : pairs) {
        if (d.admit(p)) out.push_back(std::move(p));
    }
    return out;
}

namespace {

CorpusStatsRow stats_for_entry(const ManifestEntry& entry, const StatsOptions& options) {
    CorpusReader reader(entry, options.load);
    Deduplicator dd(options.dedup);
    CorpusStatsRow row;
    row.corpus_name = entry.corpus_name;
    row.source_lang = entry.source_lang;
    row.target_lang = entry.target_lang;
    row.counted_lang = entry.target_lang == kEnglish ? entry.source_lang : entry.target_lang;
    row.declared = entry.pair_count;
    while (auto pair = reader.next()) {
        if (dd.admit(*pair)) ++row.pair_count;
    }
    row.counters = reader.counters();
    row.duplicates = dd.duplicates();
    return row;
}

}  // namespace

CorpusStats corpus_stats(const CorpusManifest& manifest, const StatsOptions& options) {
    manifest.validate();
    CorpusStats stats;
    stats.dedup_enabled = options.dedup;
    stats.min_quality = options.load.min_quality;
    const size_t n = manifest.entries.size();
    stats.rows.resize(n);

    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> cursor{0};
    auto work = [&] {
        for (size_t i = cursor++; i < n; i = cursor++) {
            try {
                stats.rows[i] = stats_for_entry(manifest.entries[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::clamp<unsigned>(options.workers, 1, static_cast<unsigned>(std::max<size_t>(n, 1)));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (const auto& row : stats.rows) {
        if (stats.filters_off() && row.declared && *row.declared != row.pair_count) {
            throw InputError("corpus '" + row.corpus_name + "' declares " + std::to_string(*row.declared) +
                             " pairs but contains " + std::to_string(row.pair_count));
        }
        stats.total_per_lang[row.counted_lang] += row.pair_count;
    }
    return stats;
}

std::string stats_to_tsv(const CorpusStats& stats) {
    std::ostringstream out;
    out << "corpus_name\tlang_pair\tpair_count\tlines\tmalformed\tbelow_quality\tduplicates\tdeclared\n";
    for (const auto& r : stats.rows) {
        out << r.corpus_name << '\t' << r.source_lang.str() << '-' << r.target_lang.str() << '\t' << r.pair_count
            << '\t' << r.counters.lines << '\t' << r.counters.malformed << '\t' << r.counters.below_quality << '\t'
            << r.duplicates << '\t';
        if (r.declared) out << *r.declared;
        out << '\n';
    }
    for (const auto& [lang, total] : stats.total_per_lang) {
        out << "TOTAL\t" << lang.str() << '\t' << total << "\t\t\t\t\t\n";
    }
    return out.str();
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : stats.rows) {
        nlohmann::json row{
            {"corpus_name", r.corpus_name},
            {"lang_pair", r.source_lang.str() + "-" + r.target_lang.str()},
            {"counted_lang", r.counted_lang.str()},
            {"pair_count", r.pair_count},
            {"lines", r.counters.lines},
            {"malformed", r.counters.malformed},
            {"below_quality", r.counters.below_quality},
            {"duplicates", r.duplicates},
            {"declared", r.declared ? nlohmann::json(*r.declared) : nlohmann::json(nullptr)},
        };
        rows.push_back(std::move(row));
    }
    nlohmann::json totals = nlohmann::json::object();
    for (const auto& [lang, total] : stats.total_per_lang) totals[lang.str()] = total;
    return {
        {"rows", rows},
        {"total_per_lang", totals},
        {"dedup", stats.dedup_enabled ? "enabled" : "disabled (key set off; duplicates not removed)"},
        {"min_quality", stats.min_quality ? nlohmann::json(*stats.min_quality) : nlohmann::json(nullptr)},
    };
}

}  // namespace polyalign::corpus
