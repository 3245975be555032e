#include "polyalign/text.hpp"

#include <unicode/ucasemap.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <stdexcept>

namespace polyalign::text {

namespace {

// Decodes one code point at byte offset i. Returns the code point (negative on
// invalid input) and advances i past the consumed bytes.
UChar32 next_codepoint(std::string_view s, int32_t& i) {
    UChar32 c = 0;
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    const auto length = static_cast<int32_t>(s.size());
    U8_NEXT(bytes, i, length, c);
    return c;
}

bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

void append_codepoint(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    out.append(buf, static_cast<size_t>(n));
}

}  // namespace

std::string_view trim(std::string_view s) {
    int32_t begin = 0;
    int32_t end = 0;
    bool seen = false;
    int32_t i = 0;
    while (i < static_cast<int32_t>(s.size())) {
        const int32_t start = i;
        const UChar32 c = next_codepoint(s, i);
        if (!is_space(c)) {
            if (!seen) begin = start;
            seen = true;
            end = i;
        }
    }
    if (!seen) return {};
    return s.substr(static_cast<size_t>(begin), static_cast<size_t>(end - begin));
}

std::string collapse_whitespace(std::string_view s) {
    s = trim(s);
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    int32_t i = 0;
    while (i < static_cast<int32_t>(s.size())) {
        const int32_t start = i;
        const UChar32 c = next_codepoint(s, i);
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(s.substr(static_cast<size_t>(start), static_cast<size_t>(i - start)));
    }
    return out;
}

std::string to_lower(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    UCaseMap* map = ucasemap_open("", 0, &status);
    if (U_FAILURE(status)) throw std::runtime_error("ucasemap_open failed");
    std::string out(s.size() + s.size() / 2 + 4, '\0');
    const auto length = static_cast<int32_t>(s.size());
    int32_t n = ucasemap_utf8ToLower(map, out.data(), static_cast<int32_t>(out.size()), s.data(), length, &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        status = U_ZERO_ERROR;
        out.resize(static_cast<size_t>(n));
        n = ucasemap_utf8ToLower(map, out.data(), n, s.data(), length, &status);
    }
    ucasemap_close(map);
    if (U_FAILURE(status)) return std::string(s);
    out.resize(static_cast<size_t>(n));
    return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    int32_t i = 0;
    while (i < static_cast<int32_t>(s.size())) {
        const int32_t start = i;
        const UChar32 c = next_codepoint(s, i);
        if (is_space(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.append(s.substr(static_cast<size_t>(start), static_cast<size_t>(i - start)));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> split_codepoints(std::string_view s) {
    std::vector<std::string> tokens;
    int32_t i = 0;
    while (i < static_cast<int32_t>(s.size())) {
        const int32_t start = i;
        const UChar32 c = next_codepoint(s, i);
        if (is_space(c)) continue;
        tokens.emplace_back(s.substr(static_cast<size_t>(start), static_cast<size_t>(i - start)));
    }
    return tokens;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t pos = 0;
    while (true) {
        const size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return fields;
}

std::string tsv_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string tsv_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out.push_back(s[i]);
            continue;
        }
        switch (s[++i]) {
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case '\\': out.push_back('\\'); break;
            default:
                out.push_back('\\');
                out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace polyalign::text
