#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"
#include "polyalign/embeddings.hpp"

namespace polyalign {

/// Similarity gamma stays this far inside (0, 1).
inline constexpr double kGammaEpsilon = 1e-3;

/// A language and its similarity gamma to the pivot language (English).
struct LanguageProfile {
    LangCode lang;
    double gamma = 0.5;
    int64_t sample_count = 0;
    std::string method_tag;
};

/// gamma = clamp((mean cosine + 1) / 2, eps, 1 - eps) over the sentence ids
/// present for both languages. Throws InputError when no id is shared and
/// DomainError on a zero-norm vector.
LanguageProfile compute_similarity(const EmbeddingDump& dump, const LangCode& target, const LangCode& pivot = kEnglish);

/// Manually supplied gamma; must lie strictly inside (0, 1).
LanguageProfile load_profile_override(const LangCode& lang, double gamma);

nlohmann::json to_json(const LanguageProfile& profile);
LanguageProfile profile_from_json(const nlohmann::json& j);

}  // namespace polyalign
