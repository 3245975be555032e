#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace polyalign::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Value kinds a config field may take.
enum class Kind {
    string,
    path,
    number,
    number_or_null,
    integer,
    boolean,
    lang_list,
    path_list,
    path_map,
    number_map,
    integer_map,
    object,
};

struct Field {
    std::string_view name;
    Kind kind;
    bool required = false;
    std::string_view help;
};

class RunContext;

struct Command {
    std::string_view name;
    std::string_view description;
    std::vector<Field> fields;
    /// Outputs depend on network replies and are not expected to reproduce.
    bool deterministic = true;
    std::function<void(RunContext&)> run;
};

/// Every run subcommand, in help order.
const std::vector<Command>& commands();
const Command* find_command(std::string_view name);

/// Checks field names and kinds, required fields and that every path field
/// names an existing file. Throws ConfigError.
void check_config(const Command& command, const nlohmann::json& config);

/// Makes every path-kind field absolute relative to base_dir.
nlohmann::json resolve_paths(const Command& command, nlohmann::json config, const std::filesystem::path& base_dir);

/// JSON Schema (2020-12) describing every subcommand's config object.
nlohmann::json config_schema();

/// Output directory, resolved config and bookkeeping for one run.
class RunContext {
public:
    RunContext(const Command& command, nlohmann::json config, std::filesystem::path out_dir, unsigned default_workers);

    const Command& command() const { return command_; }
    const nlohmann::json& config() const { return config_; }
    const std::filesystem::path& out_dir() const { return out_dir_; }

    bool has(std::string_view key) const;
    std::string str(std::string_view key, std::string fallback = {}) const;
    std::filesystem::path path(std::string_view key) const;
    std::optional<std::filesystem::path> opt_path(std::string_view key) const;
    double number(std::string_view key, double fallback) const;
    int64_t integer(std::string_view key, int64_t fallback) const;
    bool boolean(std::string_view key, bool fallback) const;
    /// Required seed; ConfigError when absent.
    uint64_t seed() const;
    unsigned workers() const;

    /// Path of an output file inside the run directory, recorded in the manifest.
    std::filesystem::path output(const std::string& name);
    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& j);
    /// A file read indirectly (e.g. a corpus named inside a manifest).
    void add_input(const std::filesystem::path& file);

    /// Seed taken from an input file rather than the config, for the manifest.
    std::optional<uint64_t> recorded_seed;

    /// Printed to stdout on success.
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json manifest() const;

private:
    const Command& command_;
    nlohmann::json config_;
    std::filesystem::path out_dir_;
    unsigned default_workers_;
    std::vector<std::string> outputs_;
    std::vector<std::filesystem::path> extra_inputs_;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);

/// Versions of the linked libraries, recorded in every manifest.
nlohmann::json library_versions();

/// Entry point. Returns the process exit status: 0 success, 1 runtime
/// error, 2 usage or config schema error.
int run(int argc, char** argv);

}  // namespace polyalign::cli
