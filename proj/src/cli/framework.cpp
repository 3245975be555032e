#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <openssl/evp.h>
#include <openssl/opensslv.h>
#include <unicode/uversion.h>

#include "polyalign/cli.hpp"
#include "polyalign/common.hpp"
#include "polyalign/prng.hpp"
#include "polyalign/scaling_law.hpp"

namespace fs = std::filesystem;

namespace polyalign::cli {

namespace {

std::string_view kind_name(Kind k) {
    switch (k) {
        case Kind::string: return "string";
        case Kind::path: return "path";
        case Kind::number: return "number";
        case Kind::number_or_null: return "number or null";
        case Kind::integer: return "integer";
        case Kind::boolean: return "boolean";
        case Kind::lang_list: return "array of language codes";
        case Kind::path_list: return "array of paths";
        case Kind::path_map: return "object of paths";
        case Kind::number_map: return "object of numbers";
        case Kind::integer_map: return "object of integers";
        case Kind::object: return "object";
    }
    return "value";
}

bool all_of_values(const nlohmann::json& j, bool (nlohmann::json::*pred)() const noexcept) {
    return std::all_of(j.begin(), j.end(), [&](const nlohmann::json& v) { return (v.*pred)(); });
}

bool kind_matches(Kind k, const nlohmann::json& v) {
    switch (k) {
        case Kind::string:
        case Kind::path: return v.is_string();
        case Kind::number: return v.is_number();
        case Kind::number_or_null: return v.is_number() || v.is_null();
        case Kind::integer: return v.is_number_integer();
        case Kind::boolean: return v.is_boolean();
        case Kind::lang_list:
        case Kind::path_list: return v.is_array() && all_of_values(v, &nlohmann::json::is_string);
        case Kind::path_map: return v.is_object() && all_of_values(v, &nlohmann::json::is_string);
        case Kind::number_map: return v.is_object() && all_of_values(v, &nlohmann::json::is_number);
        case Kind::integer_map: return v.is_object() && all_of_values(v, &nlohmann::json::is_number_integer);
        case Kind::object: return v.is_object();
    }
    return false;
}

nlohmann::json kind_schema(Kind k) {
    const nlohmann::json str{{"type", "string"}};
    const nlohmann::json lang{{"type", "string"}, {"pattern", "^[a-z]{2}$"}};
    switch (k) {
        case Kind::string: return str;
        case Kind::path: return {{"type", "string"}, {"minLength", 1}};
        case Kind::number: return {{"type", "number"}};
        case Kind::number_or_null: return {{"type", {"number", "null"}}};
        case Kind::integer: return {{"type", "integer"}};
        case Kind::boolean: return {{"type", "boolean"}};
        case Kind::lang_list: return {{"type", "array"}, {"items", lang}};
        case Kind::path_list: return {{"type", "array"}, {"items", str}};
        case Kind::path_map: return {{"type", "object"}, {"additionalProperties", str}};
        case Kind::number_map: return {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}};
        case Kind::integer_map: return {{"type", "object"}, {"additionalProperties", {{"type", "integer"}}}};
        case Kind::object: return {{"type", "object"}};
    }
    return nlohmann::json::object();
}

bool is_path_kind(Kind k) {
    return k == Kind::path || k == Kind::path_list || k == Kind::path_map;
}

template <typename Fn>
void for_each_path(const Command& command, const nlohmann::json& config, Fn fn) {
    for (const auto& f : command.fields) {
        if (!is_path_kind(f.kind) || !config.contains(f.name)) continue;
        const auto& v = config.at(std::string(f.name));
        if (f.kind == Kind::path) {
            fn(f.name, v.get<std::string>());
        } else {
            for (const auto& item : v) fn(f.name, item.get<std::string>());
        }
    }
}

const Field* find_field(const Command& command, std::string_view key) {
    for (const auto& f : command.fields) {
        if (f.name == key) return &f;
    }
    return nullptr;
}

}  // namespace

const Command* find_command(std::string_view name) {
    for (const auto& c : commands()) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void check_config(const Command& command, const nlohmann::json& config) {
    const std::string where = "config for '" + std::string(command.name) + "'";
    if (!config.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : config.items()) {
        const Field* f = find_field(command, key);
        if (f == nullptr) throw ConfigError(where + ": unknown field '" + key + "'");
        if (!kind_matches(f->kind, value))
            throw ConfigError(where + ": field '" + key + "' must be " + std::string(kind_name(f->kind)));
        if (f->kind == Kind::lang_list) {
            for (const auto& l : value) LangCode(l.get<std::string>());
        }
    }
    for (const auto& f : command.fields) {
        if (f.required && !config.contains(f.name))
            throw ConfigError(where + ": missing required field '" + std::string(f.name) + "'");
    }
    for_each_path(command, config, [&](std::string_view key, const std::string& p) {
        if (!fs::is_regular_file(p))
            throw ConfigError(where + ": field '" + std::string(key) + "' names a missing file: " + p);
    });
}

nlohmann::json resolve_paths(const Command& command, nlohmann::json config, const fs::path& base_dir) {
    const auto abs = [&](const nlohmann::json& v) {
        fs::path p(v.get<std::string>());
        if (p.is_relative()) p = base_dir / p;
        return fs::absolute(p).lexically_normal().string();
    };
    for (const auto& f : command.fields) {
        if (!is_path_kind(f.kind) || !config.contains(f.name)) continue;
        auto& v = config[std::string(f.name)];
        if (f.kind == Kind::path && v.is_string()) {
            v = abs(v);
        } else if (v.is_array() || v.is_object()) {
            for (auto& item : v) {
                if (item.is_string()) item = abs(item);
            }
        }
    }
    return config;
}

nlohmann::json config_schema() {
    nlohmann::json defs = nlohmann::json::object();
    for (const auto& c : commands()) {
        nlohmann::json props = nlohmann::json::object();
        nlohmann::json required = nlohmann::json::array();
        for (const auto& f : c.fields) {
            auto s = kind_schema(f.kind);
            s["description"] = f.help;
            props[std::string(f.name)] = std::move(s);
            if (f.required) required.push_back(f.name);
        }
        defs[std::string(c.name)] = {{"description", c.description},
                                     {"type", "object"},
                                     {"properties", props},
                                     {"required", required},
                                     {"additionalProperties", false}};
    }
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"$id", "polyalign/config.schema.json"},
            {"title", "polyalign run configuration"},
            {"description", "Per-subcommand configuration objects. Relative paths resolve against the config file."},
            {"$defs", defs}};
}

RunContext::RunContext(const Command& command, nlohmann::json config, fs::path out_dir, unsigned default_workers)
    : command_(command), config_(std::move(config)), out_dir_(std::move(out_dir)), default_workers_(default_workers) {}

bool RunContext::has(std::string_view key) const {
    return config_.contains(key) && !config_.at(std::string(key)).is_null();
}

std::string RunContext::str(std::string_view key, std::string fallback) const {
    return has(key) ? config_.at(std::string(key)).get<std::string>() : fallback;
}

fs::path RunContext::path(std::string_view key) const {
    if (!has(key)) throw ConfigError("missing required field '" + std::string(key) + "'");
    return config_.at(std::string(key)).get<std::string>();
}

std::optional<fs::path> RunContext::opt_path(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return path(key);
}

double RunContext::number(std::string_view key, double fallback) const {
    return has(key) ? config_.at(std::string(key)).get<double>() : fallback;
}

int64_t RunContext::integer(std::string_view key, int64_t fallback) const {
    return has(key) ? config_.at(std::string(key)).get<int64_t>() : fallback;
}

bool RunContext::boolean(std::string_view key, bool fallback) const {
    return has(key) ? config_.at(std::string(key)).get<bool>() : fallback;
}

uint64_t RunContext::seed() const {
    if (!has("seed")) throw ConfigError("'" + std::string(command_.name) + "' needs an explicit seed (config or --seed)");
    return config_.at("seed").get<uint64_t>();
}

unsigned RunContext::workers() const {
    const auto w = integer("workers", 0);
    if (w < 0) throw ConfigError("workers must be non-negative");
    return w == 0 ? default_workers_ : static_cast<unsigned>(w);
}

fs::path RunContext::output(const std::string& name) {
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
    return out_dir_ / name;
}

void RunContext::write(const std::string& name, const std::string& content) {
    const auto p = output(name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + p.string());
}

void RunContext::write_json(const std::string& name, const nlohmann::json& j) {
    write(name, j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
}

void RunContext::add_input(const fs::path& file) {
    extra_inputs_.push_back(fs::absolute(file).lexically_normal());
}

nlohmann::json RunContext::manifest() const {
    std::vector<std::string> inputs;
    for_each_path(command_, config_, [&](std::string_view, const std::string& p) { inputs.push_back(p); });
    for (const auto& p : extra_inputs_) inputs.push_back(p.string());
    std::sort(inputs.begin(), inputs.end());
    inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());

    nlohmann::json in = nlohmann::json::array();
    for (const auto& p : inputs) {
        in.push_back({{"path", p}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
    auto names = outputs_;
    std::sort(names.begin(), names.end());
    nlohmann::json out = nlohmann::json::array();
    for (const auto& name : names) {
        const auto p = out_dir_ / name;
        if (!fs::is_regular_file(p)) continue;
        out.push_back({{"file", name}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
    return {{"tool", "polyalign"},
            {"version", kToolVersion},
            {"subcommand", command_.name},
            {"config", config_},
            {"seed", recorded_seed ? nlohmann::json(*recorded_seed)
                                  : (config_.contains("seed") ? config_.at("seed") : nlohmann::json(nullptr))},
            {"prng", kPrngVersion},
            {"deterministic", command_.deterministic},
            {"inputs", in},
            {"outputs", out},
            {"libraries", library_versions()}};
}

std::string sha256_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot read " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char byte[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", md[i]);
        hex += byte;
    }
    return hex;
}

nlohmann::json library_versions() {
    return {{"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"icu", U_ICU_VERSION},
            {"openssl", OPENSSL_VERSION_TEXT},
            {"cli11", CLI11_VERSION}};
}

namespace {

struct ExitError {
    int code;
    std::string type;
    std::string message;
    nlohmann::json details;
};

nlohmann::json error_json(const ExitError& e) {
    nlohmann::json j{{"status", "error"}, {"exit_code", e.code}, {"error_type", e.type}, {"message", e.message}};
    if (!e.details.is_null()) j["details"] = e.details;
    return j;
}

void report_error(const ExitError& e, const std::optional<fs::path>& out_dir) {
    const auto j = error_json(e);
    std::cerr << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    if (!out_dir) return;
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    std::ofstream out(*out_dir / "error.json", std::ios::binary | std::ios::trunc);
    if (out) out << j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

nlohmann::json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read config " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config " + p.string() + " is not valid JSON: " + ex.what());
    }
}

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<int64_t> workers;
    std::optional<std::string> min_quality;
    std::optional<std::string> tokenizer;
    std::optional<int64_t> first_n;
    std::optional<int64_t> budget;
    std::optional<std::string> direction;
};

void apply_override(const Command& command, nlohmann::json& config, std::string_view flag, std::string_view key,
                    nlohmann::json value) {
    if (find_field(command, key) == nullptr)
        throw ConfigError("--" + std::string(flag) + " does not apply to '" + std::string(command.name) + "'");
    config[std::string(key)] = std::move(value);
}

nlohmann::json apply_overrides(const Command& command, nlohmann::json config, const Overrides& o) {
    if (o.seed) apply_override(command, config, "seed", "seed", *o.seed);
    if (o.workers) apply_override(command, config, "workers", "workers", *o.workers);
    if (o.min_quality) {
        nlohmann::json v;
        if (*o.min_quality != "none") {
            try {
                size_t used = 0;
                v = std::stod(*o.min_quality, &used);
                if (used != o.min_quality->size()) throw std::invalid_argument("trailing text");
            } catch (const std::exception&) {
                throw ConfigError("--min-quality takes a number or 'none'");
            }
        }
        apply_override(command, config, "min-quality", "min_quality", v);
    }
    if (o.tokenizer) apply_override(command, config, "tokenizer", "tokenizer", *o.tokenizer);
    if (o.first_n) apply_override(command, config, "first-n", "first_n", *o.first_n);
    if (o.budget) apply_override(command, config, "budget", "budget", *o.budget);
    if (o.direction) apply_override(command, config, "direction", "direction", *o.direction);
    return config;
}

/// Resolves the config source: a plain config object or a previous run's manifest.json.
nlohmann::json load_config(const Command& command, const std::optional<fs::path>& config_file) {
    if (!config_file) return nlohmann::json::object();
    auto j = read_json_file(*config_file);
    if (j.is_object() && j.value("tool", "") == "polyalign" && j.contains("config") && j.contains("subcommand")) {
        if (j["subcommand"] != command.name)
            throw ConfigError("manifest " + config_file->string() + " records subcommand '" +
                              j["subcommand"].get<std::string>() + "', not '" + std::string(command.name) + "'");
        j = j["config"];
    }
    if (!j.is_object()) throw ConfigError("config " + config_file->string() + " must hold a JSON object");
    return resolve_paths(command, std::move(j), fs::absolute(*config_file).parent_path());
}

int execute(const Command& command, nlohmann::json config, const fs::path& out_dir) {
    check_config(command, config);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    fs::remove(out_dir / "error.json", ec);
    const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
    RunContext ctx(command, std::move(config), out_dir, cores);
    command.run(ctx);
    const auto manifest = ctx.manifest();
    std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    if (!out) throw Error("cannot write manifest.json");
    std::cout << ctx.summary.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Cross-lingual instruction-tuning data toolkit: corpus statistics, scaling laws, data-budget "
                 "allocation, dataset building and evaluation."};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::optional<fs::path> config_file;
    std::optional<fs::path> out_dir;
    Overrides o;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "JSON config (or a previous run's manifest.json)");
        sub->add_option("--out-dir", out_dir, "Run directory for outputs and manifest.json")->required();
        sub->add_option("--seed", o.seed, "Seed for every random stream of the run");
        sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
        sub->add_option("--min-quality", o.min_quality, "Mined-corpus score threshold, or 'none'");
        sub->add_option("--tokenizer", o.tokenizer, "BLEU tokenizer: whitespace, char, external_subword");
        sub->add_option("--first-n", o.first_n, "Judge only the first N items");
        sub->add_option("--budget", o.budget, "Total translation-pair budget");
        sub->add_option("--direction", o.direction, "Translation direction: en_to_x, x_to_en, both_split");
    };

    for (const auto& c : commands()) add_common(app.add_subcommand(std::string(c.name), std::string(c.description)));

    fs::path rerun_manifest;
    auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json into a new run directory");
    rerun->add_option("manifest", rerun_manifest, "manifest.json of the earlier run")->required();
    rerun->add_option("--out-dir", out_dir, "Run directory for outputs")->required();

    std::optional<fs::path> schema_out;
    auto* schema = app.add_subcommand("schema", "Print the JSON Schema of all config objects");
    schema->add_option("--output", schema_out, "Write the schema to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error({2, "usage", e.what(), nullptr}, std::nullopt);
        return 2;
    }

    try {
        if (schema->parsed()) {
            const auto text = config_schema().dump(2) + "\n";
            if (schema_out) {
                std::ofstream out(*schema_out, std::ios::binary | std::ios::trunc);
                out << text;
                if (!out) throw Error("cannot write " + schema_out->string());
            } else {
                std::cout << text;
            }
            return 0;
        }
        if (rerun->parsed()) {
            const auto m = read_json_file(rerun_manifest);
            if (!m.is_object() || !m.contains("subcommand") || !m.contains("config"))
                throw ConfigError(rerun_manifest.string() + " is not a run manifest");
            const Command* command = find_command(m["subcommand"].get<std::string>());
            if (command == nullptr) throw ConfigError("manifest names unknown subcommand " + m["subcommand"].dump());
            return execute(*command, m["config"], *out_dir);
        }
        for (const auto& c : commands()) {
            if (!app.got_subcommand(std::string(c.name))) continue;
            auto config = apply_overrides(c, load_config(c, config_file), o);
            return execute(c, std::move(config), *out_dir);
        }
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        report_error({2, "config", e.what(), nullptr}, out_dir);
        return 2;
    } catch (const RejectedFitError& e) {
        report_error({1, "rejected_fit", e.what(), {{"alpha", e.alpha}, {"beta", e.beta}, {"rmse", e.rmse}}}, out_dir);
        return 1;
    } catch (const CorruptInputError& e) {
        report_error({1, "corrupt_input", e.what(), nullptr}, out_dir);
        return 1;
    } catch (const InputError& e) {
        report_error({1, "input", e.what(), nullptr}, out_dir);
        return 1;
    } catch (const DomainError& e) {
        report_error({1, "domain", e.what(), nullptr}, out_dir);
        return 1;
    } catch (const std::exception& e) {
        report_error({1, "runtime", e.what(), nullptr}, out_dir);
        return 1;
    }
}

}  // namespace polyalign::cli
