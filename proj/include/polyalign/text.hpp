#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polyalign::text {

/// Strips leading and trailing ASCII/Unicode whitespace.
std::string_view trim(std::string_view s);

/// trim() plus every internal whitespace run replaced by a single space.
std::string collapse_whitespace(std::string_view s);

/// Full Unicode lowercase mapping (root locale) of a UTF-8 string, so
/// U+0130 becomes "i" plus a combining dot. Scripts without case pass through.
std::string to_lower(std::string_view s);

/// Splits on whitespace runs; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

/// Every non-whitespace code point becomes one token.
std::vector<std::string> split_codepoints(std::string_view s);

/// Splits on '\t' keeping empty fields.
std::vector<std::string_view> split_tabs(std::string_view line);

/// Escapes '\\', '\t', '\n' and '\r' so a value fits in one TSV cell.
std::string tsv_escape(std::string_view s);
std::string tsv_unescape(std::string_view s);

/// Removes a trailing '\r' left by CRLF files.
inline std::string_view chomp_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace polyalign::text
