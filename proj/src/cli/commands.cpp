#include <fstream>
#include <set>
#include <sstream>

#include "polyalign/allocator.hpp"
#include "polyalign/cli.hpp"
#include "polyalign/corpus.hpp"
#include "polyalign/dataset.hpp"
#include "polyalign/judge.hpp"
#include "polyalign/metrics.hpp"
#include "polyalign/repspace.hpp"
#include "polyalign/scaling_law.hpp"
#include "polyalign/similarity.hpp"
#include "polyalign/text.hpp"

namespace fs = std::filesystem;

namespace polyalign::cli {

namespace {

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot read " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(p.string() + " is not valid JSON: " + ex.what());
    }
}

std::vector<std::string> read_plain_lines(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.emplace_back(text::chomp_cr(line));
    return lines;
}

std::optional<double> min_quality(const RunContext& ctx) {
    if (!ctx.config().contains("min_quality")) return corpus::kDefaultMinQuality;
    const auto& v = ctx.config().at("min_quality");
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

void add_corpus_inputs(RunContext& ctx, const corpus::CorpusManifest& manifest) {
    for (const auto& e : manifest.entries) {
        if (e.format == corpus::CorpusFormat::moses_two_file) {
            ctx.add_input(e.file_path.string() + "." + e.source_lang.str());
            ctx.add_input(e.file_path.string() + "." + e.target_lang.str());
        } else {
            ctx.add_input(e.file_path);
        }
    }
}

nlohmann::json map_to_json(const std::map<LangCode, int64_t>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k.str()] = v;
    return j;
}

// stats ---------------------------------------------------------------------

void run_stats(RunContext& ctx) {
    const auto manifest = corpus::CorpusManifest::load(ctx.path("manifest"));
    add_corpus_inputs(ctx, manifest);
    corpus::StatsOptions opt;
    opt.load.min_quality = min_quality(ctx);
    opt.dedup = ctx.boolean("dedup", true);
    opt.workers = ctx.workers();
    const auto stats = corpus::corpus_stats(manifest, opt);
    ctx.write("stats.tsv", corpus::stats_to_tsv(stats));
    ctx.write_json("stats.json", corpus::stats_to_json(stats));
    ctx.summary = {{"corpora", stats.rows.size()}, {"total_per_lang", map_to_json(stats.total_per_lang)}};
}

// similarity ----------------------------------------------------------------

void run_similarity(RunContext& ctx) {
    const auto dump = EmbeddingDump::load(ctx.path("embeddings"));
    const LangCode pivot(ctx.str("pivot", "en"));
    std::map<LangCode, double> overrides;
    if (ctx.has("overrides")) {
        for (const auto& [lang, g] : ctx.config().at("overrides").items()) overrides[LangCode(lang)] = g.get<double>();
    }
    std::vector<LangCode> langs;
    if (ctx.has("langs")) {
        for (const auto& l : ctx.config().at("langs")) langs.emplace_back(l.get<std::string>());
    } else {
        std::set<LangCode> seen;
        for (const auto& r : dump.records) {
            if (r.lang != pivot) seen.insert(r.lang);
        }
        for (const auto& [lang, _] : overrides) seen.insert(lang);
        langs.assign(seen.begin(), seen.end());
    }
    nlohmann::json profiles = nlohmann::json::array();
    nlohmann::json gammas = nlohmann::json::object();
    for (const auto& lang : langs) {
        const auto it = overrides.find(lang);
        const auto p = it != overrides.end() ? load_profile_override(lang, it->second)
                                             : compute_similarity(dump, lang, pivot);
        profiles.push_back(to_json(p));
        gammas[lang.str()] = p.gamma;
    }
    ctx.write_json("profiles.json", {{"pivot", pivot.str()}, {"profiles", profiles}});
    ctx.summary = {{"pivot", pivot.str()}, {"gamma", gammas}};
}

// fit / lawplot -------------------------------------------------------------

std::map<LangCode, LanguageProfile> read_profiles(const fs::path& p) {
    const auto j = read_json(p);
    std::map<LangCode, LanguageProfile> out;
    try {
        for (const auto& item : j.at("profiles")) {
            auto profile = profile_from_json(item);
            out.emplace(profile.lang, std::move(profile));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(p.string() + ": " + ex.what());
    }
    return out;
}

void run_fit(RunContext& ctx) {
    std::vector<std::pair<LangCode, fs::path>> series;
    if (ctx.has("series")) {
        if (ctx.has("points")) throw ConfigError("give either 'points' or 'series', not both");
        for (const auto& [lang, p] : ctx.config().at("series").items()) series.emplace_back(LangCode(lang), p.get<std::string>());
    } else {
        if (!ctx.has("points") || !ctx.has("lang")) throw ConfigError("'fit' needs 'points' and 'lang', or 'series'");
        series.emplace_back(LangCode(ctx.str("lang")), ctx.path("points"));
    }
    if (ctx.has("gamma") && series.size() != 1) throw ConfigError("'gamma' applies to a single series only");
    std::map<LangCode, LanguageProfile> profiles;
    if (ctx.has("profiles")) profiles = read_profiles(ctx.path("profiles"));

    const auto tag = ctx.str("setting_tag", "CoIT-translation");
    nlohmann::json laws = nlohmann::json::array();
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [lang, points_file] : series) {
        LanguageProfile profile;
        if (ctx.has("gamma")) {
            profile = load_profile_override(lang, ctx.number("gamma", 0.0));
        } else if (const auto it = profiles.find(lang); it != profiles.end()) {
            profile = it->second;
        } else {
            throw ConfigError("no gamma for " + lang.str() + ": give 'gamma' or a 'profiles' file that lists it");
        }
        const auto points = read_points_tsv(points_file.string());
        const auto fit = fit_law(points, profile, tag);
        laws.push_back(to_json(fit));
        summary[lang.str()] = {{"alpha", fit.law.alpha()}, {"beta", fit.law.beta()}, {"rmse", fit.rmse}};
    }
    ctx.write_json("laws.json", {{"laws", laws}});
    ctx.summary = summary;
}

std::vector<ScalingLaw> read_laws(const fs::path& p) {
    const auto j = read_json(p);
    std::vector<ScalingLaw> laws;
    if (j.is_object() && j.contains("laws")) {
        for (const auto& l : j["laws"]) laws.push_back(law_from_json(l));
    } else {
        laws.push_back(law_from_json(j));
    }
    if (laws.empty()) throw InputError(p.string() + " holds no laws");
    return laws;
}

void run_lawplot(RunContext& ctx) {
    const auto laws = read_laws(ctx.path("laws"));
    const double from = ctx.number("from", 100.0);
    const double to = ctx.number("to", 1e7);
    const auto samples = ctx.integer("samples", 50);
    if (samples < 1 || samples > 1000000) throw ConfigError("samples must be in [1, 1000000]");
    std::ostringstream out;
    out.precision(17);
    out << "lang\tdata_scale\tpredicted\n";
    for (const auto& law : laws) {
        for (const auto& s : sample_curve(law, from, to, static_cast<int>(samples)))
            out << law.profile().lang.str() << '\t' << s.data_scale << '\t' << s.predicted << '\n';
    }
    ctx.write("curve.tsv", out.str());
    ctx.summary = {{"laws", laws.size()}, {"samples", samples}};
}

// allocation ----------------------------------------------------------------

alloc::AllocationProblem problem_from(RunContext& ctx, const nlohmann::json* embedded = nullptr) {
    alloc::AllocationProblem p;
    if (ctx.has("problem")) {
        p = alloc::AllocationProblem::from_json(read_json(ctx.path("problem")));
    } else if (ctx.has("laws")) {
        p.laws = read_laws(ctx.path("laws"));
        std::map<std::string, int64_t> caps;
        if (ctx.has("caps")) {
            for (const auto& [lang, c] : ctx.config().at("caps").items()) caps[lang] = c.get<int64_t>();
        } else if (ctx.has("stats")) {
            const auto stats = read_json(ctx.path("stats"));
            for (const auto& [lang, c] : stats.at("total_per_lang").items()) caps[lang] = c.get<int64_t>();
        } else {
            throw ConfigError("'laws' needs 'caps' or 'stats' for the availability caps");
        }
        for (const auto& law : p.laws) {
            const auto it = caps.find(law.profile().lang.str());
            if (it == caps.end()) throw ConfigError("no cap for " + law.profile().lang.str());
            p.caps.push_back(it->second);
        }
        if (!ctx.has("budget")) throw ConfigError("'laws' needs a 'budget' (or --budget)");
    } else if (embedded != nullptr) {
        p = alloc::AllocationProblem::from_json(*embedded);
    } else {
        throw ConfigError("give 'problem' or 'laws' with 'caps'/'stats'");
    }
    if (ctx.has("budget")) p.budget = ctx.integer("budget", 0);
    p.validate_shape();
    return p;
}

void write_allocation(RunContext& ctx, const alloc::AllocationProblem& p, const alloc::AllocationResult& r,
                      std::string_view method) {
    auto j = alloc::to_json(r, p);
    j["method"] = method;
    j["problem"] = p.to_json();
    ctx.write_json("allocation.json", j);
    ctx.write("allocation.tsv", alloc::table_row(r, p));
    nlohmann::json amounts = nlohmann::json::object();
    for (size_t i = 0; i < p.size(); ++i) amounts[p.laws[i].profile().lang.str()] = r.amounts[i];
    ctx.summary = {{"method", method}, {"budget", p.budget}, {"amounts", amounts}, {"objective", j["objective"]}};
}

void run_allocate(RunContext& ctx) {
    const auto p = problem_from(ctx);
    write_allocation(ctx, p, alloc::solve(p), "water-filling");
}

void run_uniform(RunContext& ctx) {
    const auto p = problem_from(ctx);
    write_allocation(ctx, p, alloc::uniform_allocation(p), "uniform");
}

void run_validate(RunContext& ctx) {
    const auto result = read_json(ctx.path("allocation"));
    const nlohmann::json* embedded = result.contains("problem") ? &result["problem"] : nullptr;
    const auto p = problem_from(ctx, embedded);
    std::vector<int64_t> amounts;
    try {
        amounts = result.at("amounts").get<std::vector<int64_t>>();
        if (result.contains("languages")) {
            const auto langs = result["languages"].get<std::vector<std::string>>();
            for (size_t i = 0; i < p.size(); ++i) {
                if (i >= langs.size() || langs[i] != p.laws[i].profile().lang.str())
                    throw InputError("allocation languages do not match the problem's language order");
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw InputError("bad allocation file: " + std::string(ex.what()));
    }
    if (amounts.size() != p.size())
        throw InputError("allocation has " + std::to_string(amounts.size()) + " amounts for " +
                         std::to_string(p.size()) + " languages");
    const auto report = alloc::validate_result(p, amounts, ctx.integer("tolerance", 0));
    auto j = alloc::to_json(report);
    j["budget"] = p.budget;
    ctx.write_json("validation.json", j);
    ctx.summary = j;
}

// build / mieval ------------------------------------------------------------

void run_build(RunContext& ctx) {
    const auto recipe_file = ctx.path("recipe");
    auto rj = read_json(recipe_file);
    if (ctx.has("seed")) rj["seed"] = ctx.seed();
    if (!rj.contains("seed")) throw ConfigError("'build' needs an explicit seed (recipe, config or --seed)");
    auto recipe = data::MixRecipe::from_json(rj, recipe_file.parent_path());
    ctx.recorded_seed = recipe.seed;

    if (ctx.has("allocation")) {
        const auto alloc_json = read_json(ctx.path("allocation"));
        try {
            const auto langs = alloc_json.at("languages").get<std::vector<std::string>>();
            const auto amounts = alloc_json.at("amounts").get<std::vector<int64_t>>();
            if (langs.size() != amounts.size()) throw InputError("allocation languages and amounts differ in length");
            for (size_t i = 0; i < langs.size(); ++i) recipe.translation_amounts[LangCode(langs[i])] = amounts[i];
        } catch (const nlohmann::json::exception& ex) {
            throw InputError("bad allocation file: " + std::string(ex.what()));
        }
    }
    if (ctx.has("direction")) {
        const auto plan = data::parse_direction_plan(ctx.str("direction"));
        for (const auto& [lang, _] : recipe.translation_amounts) recipe.directions[lang] = plan;
    }
    const auto manifest = corpus::CorpusManifest::load(ctx.path("manifest"));
    add_corpus_inputs(ctx, manifest);
    for (const auto& g : recipe.general_sources) ctx.add_input(g.file_path);

    data::MixOptions opt;
    opt.load.min_quality = min_quality(ctx);
    const auto ds = data::mix(recipe, manifest, opt);
    data::write_dataset(ds, ctx.out_dir());
    for (const auto* name : {"train.json", "meta.jsonl", "provenance.json"}) ctx.output(name);

    nlohmann::json prov = nlohmann::json::object();
    for (const auto& e : ds.provenance) prov[e.source] = e.count;
    ctx.summary = {{"records", ds.records.size()}, {"seed", ds.seed}, {"provenance", prov}};
}

void run_mieval(RunContext& ctx) {
    const auto seed_lines = data::read_lines_file(ctx.path("seed_instructions"));
    std::map<LangCode, std::vector<std::string>> translations;
    for (const auto& [lang, p] : ctx.config().at("translations").items())
        translations[LangCode(lang)] = data::read_lines_file(p.get<std::string>());
    const auto set = data::build_mi_eval(seed_lines, translations);
    std::ostringstream out;
    data::write_mi_eval_tsv(out, set);
    ctx.write("mi_eval.tsv", out.str());
    ctx.summary = {{"rows", set.rows.size()}, {"languages", set.langs.size() + 1}};
}

// evaluation ----------------------------------------------------------------

int64_t resamples(const RunContext& ctx) {
    return ctx.integer("n_resamples", 1000);
}

void run_bleu(RunContext& ctx) {
    const auto hyps = read_plain_lines(ctx.path("hypotheses"));
    const auto refs = read_plain_lines(ctx.path("references"));
    eval::BleuOptions opt;
    opt.tokenizer = eval::parse_tokenizer(ctx.str("tokenizer", "whitespace"));
    opt.smoothing_epsilon = ctx.number("smoothing_epsilon", 0.0);
    if (opt.smoothing_epsilon < 0.0) throw ConfigError("smoothing_epsilon must be >= 0");
    auto report = eval::bleu(hyps, refs, opt);
    if (ctx.has("baseline")) {
        const auto base = eval::bleu(read_plain_lines(ctx.path("baseline")), refs, opt);
        report = eval::with_significance(std::move(report), base, ctx.path("baseline").filename().string(),
                                         resamples(ctx), ctx.seed());
    }
    ctx.write_json("report.json", eval::to_json(report));
    ctx.summary = {{"metric", report.metric_name}, {"bleu", report.aggregate}, {"n", report.n}};
    if (report.significance) ctx.summary["p_value"] = report.significance->p_value;
}

void run_em(RunContext& ctx) {
    const auto items = eval::read_qa_jsonl(ctx.path("items"));
    auto report = eval::exact_match(items);
    if (ctx.has("baseline_items")) {
        const auto base = eval::exact_match(eval::read_qa_jsonl(ctx.path("baseline_items")));
        report = eval::with_significance(std::move(report), base, ctx.path("baseline_items").filename().string(),
                                         resamples(ctx), ctx.seed());
    }
    ctx.write_json("report.json", eval::to_json(report));
    ctx.summary = {{"metric", report.metric_name}, {"exact_match", report.aggregate}, {"n", report.n}};
    if (report.significance) ctx.summary["p_value"] = report.significance->p_value;
}

void run_bootstrap(RunContext& ctx) {
    const auto a = eval::ingest_external_scores(ctx.path("system_a"), "system_a");
    const auto b = eval::ingest_external_scores(ctx.path("system_b"), "system_b");
    std::map<std::string, double> b_by_id;
    for (const auto& s : b.per_item) b_by_id.emplace(s.id, s.score);
    if (b_by_id.size() != a.per_item.size()) throw InputError("system score files cover different item sets");
    std::vector<double> va;
    std::vector<double> vb;
    for (const auto& s : a.per_item) {
        const auto it = b_by_id.find(s.id);
        if (it == b_by_id.end()) throw InputError("item '" + s.id + "' has no system_b score");
        va.push_back(s.score);
        vb.push_back(it->second);
    }
    const auto n = resamples(ctx);
    const auto seed = ctx.seed();
    const auto r = eval::paired_bootstrap(va, vb, n, seed);
    const double alpha = ctx.number("alpha", 0.1);
    nlohmann::json j{{"p_value", r.p_value},  {"mean_a", r.mean_a}, {"mean_b", r.mean_b},
                     {"n_items", va.size()},   {"n_resamples", n},  {"seed", seed},
                     {"alpha", alpha},         {"significant", r.p_value < alpha}};
    if (!r.note.empty()) j["note"] = r.note;
    ctx.write_json("bootstrap.json", j);
    ctx.summary = j;
}

void run_ingest(RunContext& ctx) {
    const auto report = eval::ingest_external_scores(ctx.path("scores"), ctx.str("metric_name"));
    ctx.write_json("report.json", eval::to_json(report));
    ctx.summary = {{"metric", report.metric_name}, {"aggregate", report.aggregate}, {"n", report.n}};
}

void run_judge(RunContext& ctx) {
    const auto mode = ctx.str("mode");
    if (mode != "correctness" && mode != "pairwise") throw ConfigError("judge mode must be 'correctness' or 'pairwise'");

    std::unique_ptr<eval::Transport> transport;
    if (ctx.has("replay")) {
        transport = std::make_unique<eval::ScriptedTransport>(eval::ScriptedTransport::load_replies(ctx.path("replay")));
    } else {
        eval::HttpTransportConfig hc;
        const char* key = std::getenv("JUDGE_API_KEY");
        if (key == nullptr || *key == '\0') throw ConfigError("JUDGE_API_KEY is not set");
        hc.api_key = key;
        if (ctx.has("endpoint")) {
            hc.endpoint = ctx.str("endpoint");
        } else {
            const char* endpoint = std::getenv("JUDGE_ENDPOINT");
            if (endpoint == nullptr || *endpoint == '\0') throw ConfigError("JUDGE_ENDPOINT is not set");
            hc.endpoint = endpoint;
        }
        hc.model = ctx.str("model", hc.model);
        hc.temperature = ctx.number("temperature", hc.temperature);
        hc.timeout = std::chrono::milliseconds(ctx.integer("timeout_ms", hc.timeout.count()));
        transport = std::make_unique<eval::HttpTransport>(hc);
    }

    eval::JudgeOptions opt;
    opt.max_attempts = static_cast<int>(ctx.integer("max_attempts", opt.max_attempts));
    opt.max_in_flight = static_cast<unsigned>(ctx.integer("max_in_flight", opt.max_in_flight));
    opt.base_backoff = std::chrono::milliseconds(ctx.integer("backoff_ms", opt.base_backoff.count()));
    opt.jitter_seed = ctx.has("seed") ? ctx.seed() : 0;
    if (ctx.has("first_n")) {
        const auto n = ctx.integer("first_n", 0);
        if (n < 1) throw ConfigError("first_n must be positive");
        opt.first_n = static_cast<size_t>(n);
    }
    const auto audit = ctx.output("audit.jsonl");
    fs::remove(audit);
    opt.audit_log = audit;

    eval::JudgeClient client(*transport, opt);
    std::vector<eval::JudgeVerdict> verdicts;
    if (mode == "correctness") {
        const auto items = eval::read_qa_jsonl(ctx.path("items"));
        verdicts = client.judge_correctness(items);
        ctx.summary = eval::to_json(eval::summarize_correctness(verdicts));
    } else {
        const auto items = eval::read_pairwise_jsonl(ctx.path("items"));
        verdicts = client.judge_pairwise(std::span<const eval::PairwiseItem>(items));
        ctx.summary = eval::to_json(eval::summarize_pairwise(verdicts));
    }
    std::string lines;
    for (const auto& v : verdicts) lines += eval::to_json(v).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
    ctx.write("verdicts.jsonl", lines);
    ctx.summary["transport"] = transport->describe();
    ctx.write_json("summary.json", ctx.summary);
}

// repspace ------------------------------------------------------------------

void run_repspace(RunContext& ctx) {
    const auto dump = EmbeddingDump::load(ctx.path("embeddings"));
    const auto k = ctx.integer("k", 3);
    if (k < 1) throw ConfigError("k must be positive");
    const auto reports = rep::analyze_layers(dump, LangCode(ctx.str("pivot", "en")), static_cast<int>(k), ctx.workers());
    nlohmann::json layers = nlohmann::json::array();
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& r : reports) {
        std::ostringstream out;
        rep::write_projection_tsv(out, r.projection);
        const auto name = "coords_layer_" + std::to_string(r.layer_index) + ".tsv";
        ctx.write(name, out.str());
        auto j = rep::to_json(r);
        j["coordinates"] = name;
        layers.push_back(j);
        summary.push_back({{"layer", r.layer_index},
                           {"alignment", r.alignment.overall},
                           {"separability", r.separability}});
    }
    ctx.write_json("layers.json", {{"layers", layers}});
    ctx.summary = {{"layers", summary}};
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> all = {
        {"stats",
         "Per-corpus pair counts after quality filtering and deduplication",
         {{"manifest", Kind::path, true, "Corpus manifest JSON ({\"corpora\": [...]})"},
          {"min_quality", Kind::number_or_null, false, "Score threshold for mined corpora (default 1.04, null disables)"},
          {"dedup", Kind::boolean, false, "Drop repeated (source, target) pairs (default true)"},
          {"workers", Kind::integer, false, "Worker threads (0 = all cores)"}},
         true,
         run_stats},
        {"similarity",
         "Similarity gamma of each language to the pivot from sentence embeddings",
         {{"embeddings", Kind::path, true, "Embedding dump JSONL"},
          {"pivot", Kind::string, false, "Pivot language (default en)"},
          {"langs", Kind::lang_list, false, "Languages to profile (default: every non-pivot language)"},
          {"overrides", Kind::number_map, false, "Manual gamma per language"}},
         true,
         run_similarity},
        {"fit",
         "Fit the translation scaling law to (data_scale, score) points",
         {{"points", Kind::path, false, "TSV of data_scale and score for one language"},
          {"lang", Kind::string, false, "Language of 'points'"},
          {"series", Kind::path_map, false, "Points file per language"},
          {"gamma", Kind::number, false, "Similarity gamma for a single series"},
          {"profiles", Kind::path, false, "profiles.json from 'similarity'"},
          {"setting_tag", Kind::string, false, "Label of the fitted setting"}},
         true,
         run_fit},
        {"lawplot",
         "Sample fitted laws on a log-spaced grid",
         {{"laws", Kind::path, true, "laws.json from 'fit'"},
          {"from", Kind::number, false, "Smallest data scale (default 100)"},
          {"to", Kind::number, false, "Largest data scale (default 1e7)"},
          {"samples", Kind::integer, false, "Samples per law (default 50)"}},
         true,
         run_lawplot},
        {"allocate",
         "Split a translation-data budget across languages to maximise the mean predicted score",
         {{"problem", Kind::path, false, "Allocation problem JSON"},
          {"laws", Kind::path, false, "laws.json from 'fit'"},
          {"caps", Kind::integer_map, false, "Available pairs per language"},
          {"stats", Kind::path, false, "stats.json from 'stats' (caps = total_per_lang)"},
          {"budget", Kind::integer, false, "Total pairs"}},
         true,
         run_allocate},
        {"uniform",
         "Equal split of the budget, respecting caps",
         {{"problem", Kind::path, false, "Allocation problem JSON"},
          {"laws", Kind::path, false, "laws.json from 'fit'"},
          {"caps", Kind::integer_map, false, "Available pairs per language"},
          {"stats", Kind::path, false, "stats.json from 'stats' (caps = total_per_lang)"},
          {"budget", Kind::integer, false, "Total pairs"}},
         true,
         run_uniform},
        {"validate",
         "Check an allocation against its budget and caps",
         {{"allocation", Kind::path, true, "allocation.json to check"},
          {"problem", Kind::path, false, "Allocation problem JSON (default: the one embedded in the allocation)"},
          {"laws", Kind::path, false, "laws.json from 'fit'"},
          {"caps", Kind::integer_map, false, "Available pairs per language"},
          {"stats", Kind::path, false, "stats.json from 'stats'"},
          {"budget", Kind::integer, false, "Total pairs"},
          {"tolerance", Kind::integer, false, "Allowed |sum - budget| (default 0)"}},
         true,
         run_validate},
        {"build",
         "Build the instruction-tuning dataset from general data and sampled translation pairs",
         {{"manifest", Kind::path, true, "Corpus manifest JSON"},
          {"recipe", Kind::path, true, "Mix recipe JSON"},
          {"allocation", Kind::path, false, "allocation.json whose amounts replace the recipe's"},
          {"seed", Kind::integer, false, "Overrides the recipe seed"},
          {"direction", Kind::string, false, "en_to_x, x_to_en or both_split for every language"},
          {"min_quality", Kind::number_or_null, false, "Score threshold for mined corpora (default 1.04)"}},
         true,
         run_build},
        {"mieval",
         "Assemble the multi-way instruction evaluation set",
         {{"seed_instructions", Kind::path, true, "English instructions, one per line"},
          {"translations", Kind::path_map, true, "Line-aligned translations per language"}},
         true,
         run_mieval},
        {"bleu",
         "Corpus BLEU of hypotheses against references",
         {{"hypotheses", Kind::path, true, "One hypothesis per line"},
          {"references", Kind::path, true, "One reference per line"},
          {"tokenizer", Kind::string, false, "whitespace (default), char or external_subword"},
          {"smoothing_epsilon", Kind::number, false, "Replace zero n-gram matches by this count (default 0)"},
          {"baseline", Kind::path, false, "Baseline hypotheses for a paired bootstrap"},
          {"n_resamples", Kind::integer, false, "Bootstrap resamples (default 1000)"},
          {"seed", Kind::integer, false, "Bootstrap seed (required with 'baseline')"}},
         true,
         run_bleu},
        {"em",
         "Exact-match accuracy of QA answers",
         {{"items", Kind::path, true, "QA JSONL with hypotheses"},
          {"baseline_items", Kind::path, false, "Baseline QA JSONL for a paired bootstrap"},
          {"n_resamples", Kind::integer, false, "Bootstrap resamples (default 1000)"},
          {"seed", Kind::integer, false, "Bootstrap seed (required with 'baseline_items')"}},
         true,
         run_em},
        {"bootstrap",
         "One-sided paired bootstrap test of system A over system B",
         {{"system_a", Kind::path, true, "id<TAB>score file of system A"},
          {"system_b", Kind::path, true, "id<TAB>score file of system B"},
          {"n_resamples", Kind::integer, false, "Resamples (default 1000)"},
          {"seed", Kind::integer, false, "Resampling seed"},
          {"alpha", Kind::number, false, "Significance level (default 0.1)"}},
         true,
         run_bootstrap},
        {"ingest",
         "Wrap externally computed per-item scores (COMET, BLEURT) into a report",
         {{"scores", Kind::path, true, "id<TAB>score file"}, {"metric_name", Kind::string, true, "Name of the metric"}},
         true,
         run_ingest},
        {"judge",
         "Score answers with an LLM judge over an HTTPS chat-completion endpoint",
         {{"mode", Kind::string, true, "correctness or pairwise"},
          {"items", Kind::path, true, "QA JSONL (correctness) or {id, question, answer_a, answer_b} JSONL"},
          {"endpoint", Kind::string, false, "Endpoint URL (default $JUDGE_ENDPOINT)"},
          {"model", Kind::string, false, "Judge model name"},
          {"temperature", Kind::number, false, "Decoding temperature (default 0)"},
          {"timeout_ms", Kind::integer, false, "Per-request timeout (default 60000)"},
          {"max_in_flight", Kind::integer, false, "Concurrent requests (default 4)"},
          {"max_attempts", Kind::integer, false, "Attempts per item (default 4)"},
          {"backoff_ms", Kind::integer, false, "First retry delay (default 500)"},
          {"first_n", Kind::integer, false, "Judge only the first N items"},
          {"seed", Kind::integer, false, "Backoff jitter seed (default 0)"},
          {"replay", Kind::path, false, "Scripted replies JSONL instead of the network"}},
         false,
         run_judge},
        {"repspace",
         "Per-layer cross-lingual alignment, separability and 2-D projection of embeddings",
         {{"embeddings", Kind::path, true, "Embedding dump JSONL with a layer field"},
          {"pivot", Kind::string, false, "Pivot language (default en)"},
          {"k", Kind::integer, false, "Neighbours for separability (default 3)"},
          {"workers", Kind::integer, false, "Layers analysed at once (0 = all cores)"}},
         true,
         run_repspace},
    };
    return all;
}

}  // namespace polyalign::cli
