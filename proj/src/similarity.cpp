#include "polyalign/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polyalign {

LanguageProfile compute_similarity(const EmbeddingDump& dump, const LangCode& target, const LangCode& pivot) {
    dump.validate();
    const auto target_vectors = dump.by_id(target);
    const auto pivot_vectors = dump.by_id(pivot);

    double sum = 0.0;
    int64_t shared = 0;
    for (const auto& [id, vec] : target_vectors) {
        const auto it = pivot_vectors.find(id);
        if (it == pivot_vectors.end()) continue;
        sum += cosine(vec, it->second);
        ++shared;
    }
    if (shared == 0)
        throw InputError("no sentence id is present for both " + target.str() + " and " + pivot.str());

    const double mean_cos = sum / static_cast<double>(shared);
    LanguageProfile profile;
    profile.lang = target;
    profile.gamma = std::clamp((mean_cos + 1.0) / 2.0, kGammaEpsilon, 1.0 - kGammaEpsilon);
    profile.sample_count = shared;
    profile.method_tag = "mean-cosine-multiway";
    return profile;
}

LanguageProfile load_profile_override(const LangCode& lang, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        std::ostringstream msg;
        msg << "gamma " << gamma << " for " << lang.str() << " is outside the open interval (0, 1)";
        throw DomainError(msg.str());
    }
    return LanguageProfile{lang, gamma, 0, "manual"};
}

nlohmann::json to_json(const LanguageProfile& p) {
    return {{"lang", p.lang.str()}, {"gamma", p.gamma}, {"sample_count", p.sample_count}, {"method_tag", p.method_tag}};
}

LanguageProfile profile_from_json(const nlohmann::json& j) {
    const LangCode lang(j.at("lang").get<std::string>());
    auto profile = load_profile_override(lang, j.at("gamma").get<double>());
    if (j.contains("method_tag")) profile.method_tag = j["method_tag"].get<std::string>();
    if (j.contains("sample_count")) profile.sample_count = j["sample_count"].get<int64_t>();
    return profile;
}

}  // namespace polyalign
