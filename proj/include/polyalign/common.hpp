#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyalign {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, parsed, or is inconsistent with its declaration.
class InputError : public Error {
public:
    using Error::Error;
};

/// More than half of a corpus file's lines were malformed.
class CorruptInputError : public InputError {
public:
    using InputError::InputError;
};

/// An argument falls outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configuration or request violates its declared schema.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Short language code ("en", "zh", ...). Lowercase ASCII letters only.
struct LangCode {
    std::string value;

    LangCode() = default;
    explicit LangCode(std::string code);

    const std::string& str() const { return value; }
    bool empty() const { return value.empty(); }

    friend bool operator==(const LangCode&, const LangCode&) = default;
    friend auto operator<=>(const LangCode&, const LangCode&) = default;
};

inline const LangCode kEnglish{"en"};

/// English display name of a language code, e.g. "zh" -> "Chinese".
/// Throws InputError for codes without a known name.
std::string english_name(const LangCode& lang);

}  // namespace polyalign
