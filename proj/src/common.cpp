#include "polyalign/common.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace polyalign {

LangCode::LangCode(std::string code) : value(std::move(code)) {
    const bool ok = value.size() == 2 &&
                    std::all_of(value.begin(), value.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!ok) throw InputError("invalid language code '" + value + "': expected two lowercase letters");
}

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 30> kNames{{
    {"ar", "Arabic"},   {"bg", "Bulgarian"}, {"bn", "Bengali"},  {"cs", "Czech"},
    {"de", "German"},   {"el", "Greek"},     {"en", "English"},  {"es", "Spanish"},
    {"fa", "Persian"},  {"fi", "Finnish"},   {"fr", "French"},   {"he", "Hebrew"},
    {"hi", "Hindi"},    {"id", "Indonesian"}, {"it", "Italian"}, {"ja", "Japanese"},
    {"ko", "Korean"},   {"nl", "Dutch"},     {"pl", "Polish"},   {"pt", "Portuguese"},
    {"ro", "Romanian"}, {"ru", "Russian"},   {"sv", "Swedish"},  {"sw", "Swahili"},
    {"ta", "Tamil"},    {"th", "Thai"},      {"tr", "Turkish"},  {"uk", "Ukrainian"},
    {"vi", "Vietnamese"}, {"zh", "Chinese"},
}};

}  // namespace

std::string english_name(const LangCode& lang) {
    for (const auto& [code, name] : kNames) {
        if (code == lang.str()) return std::string(name);
    }
    throw InputError("no English language name known for '" + lang.str() + "'");
}

}  // namespace polyalign
