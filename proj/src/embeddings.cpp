#include "polyalign/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

namespace polyalign {

void EmbeddingDump::validate() const {
    const size_t d = dimension();
    if (!records.empty() && d < 2) throw InputError("embedding dimension must be at least 2");
    std::set<std::tuple<int64_t, LangCode, int64_t>> seen;
    for (const auto& r : records) {
        if (r.vector.size() != d)
            throw InputError("embedding for " + r.lang.str() + "/" + std::to_string(r.sentence_id) + " has dimension " +
                             std::to_string(r.vector.size()) + ", expected " + std::to_string(d));
        for (double v : r.vector) {
            if (!std::isfinite(v))
                throw InputError("non-finite component in embedding " + r.lang.str() + "/" +
                                 std::to_string(r.sentence_id));
        }
        if (!seen.emplace(r.layer.value_or(-1), r.lang, r.sentence_id).second)
            throw InputError("duplicate embedding record " + r.lang.str() + "/" + std::to_string(r.sentence_id));
    }
}

EmbeddingDump EmbeddingDump::read_jsonl(std::istream& in) {
    EmbeddingDump dump;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            EmbeddingRecord r;
            r.lang = LangCode(j.at("lang").get<std::string>());
            r.sentence_id = j.at("sentence_id").get<int64_t>();
            r.vector = j.at("vector").get<std::vector<double>>();
            if (j.contains("layer") && !j["layer"].is_null()) r.layer = j["layer"].get<int64_t>();
            dump.records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& ex) {
            throw InputError("embedding dump line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    dump.validate();
    return dump;
}

EmbeddingDump EmbeddingDump::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read embedding dump " + path.string());
    return read_jsonl(in);
}

std::map<int64_t, std::span<const double>> EmbeddingDump::by_id(const LangCode& lang) const {
    std::map<int64_t, std::span<const double>> out;
    for (const auto& r : records) {
        if (r.lang == lang) out.emplace(r.sentence_id, r.vector);
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("cosine of vectors with different dimensions");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw DomainError("cosine of a zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace polyalign
