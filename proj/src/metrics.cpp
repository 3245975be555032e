#include "polyalign/metrics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "polyalign/prng.hpp"
#include "polyalign/text.hpp"

namespace polyalign::eval {

std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read QA items from " + path.string());
    std::vector<QAItem> items;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            QAItem item;
            const auto& id = j.at("id");
            item.id = id.is_string() ? id.get<std::string>() : id.dump();
            item.context = j.value("context", std::string());
            item.question = j.value("question", std::string());
            item.reference_answer = j.at("reference_answer").get<std::string>();
            item.hypothesis = j.value("hypothesis", std::string());
            item.lang = j.value("lang", std::string());
            if (item.reference_answer.empty()) throw InputError("empty reference_answer");
            items.push_back(std::move(item));
        } catch (const std::exception& ex) {
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return items;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& s : r.per_item) items.push_back({{"id", s.id}, {"score", s.score}});
    nlohmann::json j{{"metric_name", r.metric_name}, {"aggregate", r.aggregate}, {"n", r.n}, {"per_item", items}};
    if (r.significance) {
        j["significance"] = {{"baseline_name", r.significance->baseline_name},
                             {"p_value", r.significance->p_value},
                             {"n_resamples", r.significance->n_resamples},
                             {"seed", r.significance->seed}};
    }
    return j;
}

namespace {

constexpr std::array<std::string_view, 6> kTerminalPunct{".", "。", "؟", "?", "!", ";"};

bool strip_one_terminal(std::string& s) {
    for (auto p : kTerminalPunct) {
        if (s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0) {
            s.resize(s.size() - p.size());
            return true;
        }
    }
    return false;
}

}  // namespace

std::string normalize_answer(std::string_view s) {
    std::string out = text::to_lower(text::collapse_whitespace(s));
    while (strip_one_terminal(out)) out = std::string(text::trim(out));
    return out;
}

EvalReport exact_match(std::span<const QAItem> items) {
    EvalReport report;
    report.metric_name = "exact_match";
    double hits = 0.0;
    for (const auto& item : items) {
        const double score = normalize_answer(item.hypothesis) == normalize_answer(item.reference_answer) ? 1.0 : 0.0;
        hits += score;
        report.per_item.push_back({item.id, score});
    }
    report.n = static_cast<int64_t>(items.size());
    report.aggregate = items.empty() ? 0.0 : hits / static_cast<double>(items.size());
    return report;
}

Tokenizer parse_tokenizer(std::string_view tag) {
    if (tag == "whitespace") return Tokenizer::whitespace;
    if (tag == "char") return Tokenizer::character;
    if (tag == "external_subword") return Tokenizer::external_subword;
    throw ConfigError("unknown tokenizer '" + std::string(tag) + "'");
}

std::string_view tokenizer_name(Tokenizer t) {
    switch (t) {
        case Tokenizer::whitespace: return "whitespace";
        case Tokenizer::character: return "char";
        case Tokenizer::external_subword: return "external_subword";
    }
    return "unknown";
}

std::vector<std::string> tokenize(std::string_view s, Tokenizer tokenizer) {
    return tokenizer == Tokenizer::character ? text::split_codepoints(s) : text::split_whitespace(s);
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    for (int n = 0; n < 4; ++n) {
        matches[n] += o.matches[n];
        totals[n] += o.totals[n];
    }
    return *this;
}

double BleuStats::score(double smoothing_epsilon) const {
    if (hyp_len == 0) return 0.0;
    // orders with no hypothesis n-grams at all are left out of the mean
    double log_sum = 0.0;
    int orders = 0;
    for (int n = 0; n < 4; ++n) {
        if (totals[n] == 0) break;
        double m = static_cast<double>(matches[n]);
        if (m == 0.0) {
            if (smoothing_epsilon <= 0.0) return 0.0;
            m = smoothing_epsilon;
        }
        log_sum += std::log(m / static_cast<double>(totals[n]));
        ++orders;
    }
    if (orders == 0) return 0.0;
    const double bp = hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / hyp_len) : 1.0;
    return 100.0 * bp * std::exp(log_sum / orders);
}

BleuStats bleu_stats(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    BleuStats st;
    st.hyp_len = static_cast<int64_t>(hyp.size());
    st.ref_len = static_cast<int64_t>(ref.size());
    for (size_t n = 1; n <= 4; ++n) {
        std::map<std::vector<std::string_view>, int64_t> ref_counts;
        for (size_t i = 0; i + n <= ref.size(); ++i) {
            ++ref_counts[std::vector<std::string_view>(ref.begin() + i, ref.begin() + i + n)];
        }
        std::map<std::vector<std::string_view>, int64_t> hyp_counts;
        for (size_t i = 0; i + n <= hyp.size(); ++i) {
            ++hyp_counts[std::vector<std::string_view>(hyp.begin() + i, hyp.begin() + i + n)];
        }
        for (const auto& [gram, count] : hyp_counts) {
            st.totals[n - 1] += count;
            const auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) st.matches[n - 1] += std::min(count, it->second);
        }
    }
    return st;
}

EvalReport bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                const BleuOptions& options) {
    if (hypotheses.size() != references.size())
        throw InputError("BLEU needs as many hypotheses (" + std::to_string(hypotheses.size()) + ") as references (" +
                         std::to_string(references.size()) + ")");
    if (hypotheses.empty()) throw InputError("BLEU of an empty corpus");
    EvalReport report;
    report.metric_name = "bleu[tok=" + std::string(tokenizer_name(options.tokenizer)) + ",smooth=" +
                         (options.smoothing_epsilon > 0.0 ? "eps" : "none") + "]";
    BleuStats corpus;
    for (size_t i = 0; i < hypotheses.size(); ++i) {
        const auto st = bleu_stats(tokenize(hypotheses[i], options.tokenizer), tokenize(references[i], options.tokenizer));
        corpus += st;
        report.per_item.push_back({std::to_string(i), st.score(options.smoothing_epsilon)});
    }
    report.n = static_cast<int64_t>(hypotheses.size());
    report.aggregate = corpus.score(options.smoothing_epsilon);
    return report;
}

BootstrapResult paired_bootstrap(std::span<const double> a, std::span<const double> b, int64_t n_resamples,
                                 uint64_t seed) {
    if (a.size() != b.size()) throw InputError("paired bootstrap needs score lists of equal length");
    if (a.size() < 2) throw InputError("paired bootstrap needs at least two items");
    if (n_resamples < 100) throw InputError("paired bootstrap needs at least 100 resamples");

    const size_t n = a.size();
    std::vector<double> diff(n);
    double full = 0.0;
    BootstrapResult result;
    result.n_resamples = n_resamples;
    result.seed = seed;
    for (size_t i = 0; i < n; ++i) {
        diff[i] = a[i] - b[i];
        full += diff[i];
        result.mean_a += a[i];
        result.mean_b += b[i];
    }
    result.mean_a /= static_cast<double>(n);
    result.mean_b /= static_cast<double>(n);
    if (!(full > 0.0)) {
        result.p_value = 1.0;
        result.note = "system A does not outperform system B on the full data";
        return result;
    }

    Prng rng(seed);
    int64_t not_better = 0;
    for (int64_t r = 0; r < n_resamples; ++r) {
        double s = 0.0;
        for (size_t k = 0; k < n; ++k) s += diff[rng.below(n)];
        if (s <= 0.0) ++not_better;
    }
    result.p_value = static_cast<double>(not_better) / static_cast<double>(n_resamples);
    return result;
}

EvalReport with_significance(EvalReport report, const EvalReport& baseline, const std::string& baseline_name,
                             int64_t n_resamples, uint64_t seed) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& s : report.per_item) a.push_back(s.score);
    for (const auto& s : baseline.per_item) b.push_back(s.score);
    const auto res = paired_bootstrap(a, b, n_resamples, seed);
    report.significance = Significance{baseline_name, res.p_value, n_resamples, seed};
    return report;
}

EvalReport ingest_external_scores(const std::filesystem::path& path, const std::string& metric_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read score file " + path.string());
    EvalReport report;
    report.metric_name = metric_name;
    std::set<std::string> ids;
    std::string raw;
    size_t lineno = 0;
    double sum = 0.0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::chomp_cr(raw);
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_tabs(line);
        if (lineno == 1 && fields.size() == 2 && fields[0] == "id" && fields[1] == "score") continue;
        if (fields.size() != 2) throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected id<TAB>score");
        const std::string id(text::trim(fields[0]));
        const auto value_text = text::trim(fields[1]);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc{} || ptr != value_text.data() + value_text.size() || !std::isfinite(value))
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": non-numeric score '" +
                             std::string(value_text) + "'");
        if (!ids.insert(id).second) throw InputError(path.string() + ": duplicate id '" + id + "'");
        report.per_item.push_back({id, value});
        sum += value;
    }
    if (report.per_item.empty()) throw InputError(path.string() + " holds no scores");
    report.n = static_cast<int64_t>(report.per_item.size());
    report.aggregate = sum / static_cast<double>(report.n);
    return report;
}

}  // namespace polyalign::eval
