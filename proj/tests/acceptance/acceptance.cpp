// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "judge_latex.hpp"
#include "polyalign/allocator.hpp"
#include "polyalign/cli.hpp"
#include "polyalign/corpus.hpp"
#include "polyalign/dataset.hpp"
#include "polyalign/judge.hpp"
#include "polyalign/metrics.hpp"
#include "polyalign/repspace.hpp"
#include "polyalign/scaling_law.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace polyalign;
using polyalign::testing::fixture;
using polyalign::testing::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// Collects failure reasons for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::string info;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
        else if (!ok) failures.push_back("");
    }
    void note(const std::string& s) { info += (info.empty() ? "" : "; ") + s; }
};

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

struct RandomLaws {
    std::mt19937_64 rng;
    explicit RandomLaws(uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int64_t integer(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(rng); }

    ScalingLaw law(const std::string& lang = "zh") {
        const double alpha = uniform(1.0, 50.0);
        double beta = uniform(-0.99, -0.01);
        if (beta == -0.99) beta = -0.98;
        double gamma = uniform(0.01, 0.99);
        if (gamma == 0.01) gamma = 0.02;
        return ScalingLaw(load_profile_override(LangCode(lang), gamma), alpha, beta);
    }
};

const char* kLangs[] = {"ar", "el", "hi", "tr", "vi", "zh", "de", "fr", "es", "ru"};

std::string lang_name(size_t i) {
    // two-letter codes beyond the fixed list: "aa", "ab", ...
    if (i < std::size(kLangs)) return kLangs[i];
    std::string s = "aa";
    s[0] = static_cast<char>('a' + (i / 26) % 26);
    s[1] = static_cast<char>('a' + i % 26);
    return s;
}

// 1. Scaling-law round trip -------------------------------------------------

void scaling_round_trip(Check& c) {
    RandomLaws gen(101);
    std::vector<ScalingLaw> laws;
    std::vector<std::vector<DataPoint>> points;
    for (int i = 0; i < 200; ++i) {
        laws.push_back(gen.law());
        std::vector<DataPoint> p;
        for (int k = 0; k < 8; ++k) {
            const auto x = static_cast<int64_t>(std::llround(std::pow(10.0, 1.0 + 3.0 * k / 7.0)));
            p.push_back({x, laws.back().eval(static_cast<double>(x))});
        }
        points.push_back(std::move(p));
    }
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (size_t i = 0; i < laws.size(); ++i) {
        const auto fit = fit_law(points[i], laws[i].profile());
        const double e = std::max(rel_err(fit.law.alpha(), laws[i].alpha()), rel_err(fit.law.beta(), laws[i].beta()));
        worst = std::max(worst, e);
        c.expect(e <= 1e-9, "law " + std::to_string(i) + " relative error " + fmt(e));
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "fits took " + fmt(secs) + " s");
    c.note("worst rel err " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s");
}

// 2. Derivative check -------------------------------------------------------

void derivative_check(Check& c) {
    RandomLaws gen(202);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto law = gen.law();
        for (int k = 0; k <= 20; ++k) {
            const double x = std::pow(10.0, 2.0 + 5.0 * k / 20.0);
            // fourth-order central stencil, step 1% of X
            const double h = 0.01 * x;
            const double fd = (-eval_law(law, x + 2 * h) + 8 * eval_law(law, x + h) - 8 * eval_law(law, x - h) +
                               eval_law(law, x - 2 * h)) /
                              (12 * h);
            const double e = rel_err(marginal_gain(law, x), fd);
            worst = std::max(worst, e);
            c.expect(e <= 1e-6, "law " + std::to_string(i) + " X=" + fmt(x) + " rel err " + fmt(e) +
                                    " (alpha " + fmt(law.alpha()) + ", beta " + fmt(law.beta()) + ", gamma " +
                                    fmt(law.gamma()) + ")");
        }
    }
    c.note("50 laws x 21 scales, worst rel err " + fmt(worst, 3));
}

// 3 and 4. Allocator optimality and dominance --------------------------------

alloc::AllocationProblem random_problem(RandomLaws& gen, size_t n, int64_t max_budget, bool tight_caps) {
    alloc::AllocationProblem p;
    int64_t cap_sum = 0;
    for (size_t i = 0; i < n; ++i) {
        p.laws.push_back(gen.law(lang_name(i)));
        p.caps.push_back(tight_caps ? gen.integer(1, max_budget) : std::numeric_limits<int32_t>::max());
        cap_sum += p.caps.back();
    }
    const auto hi = std::min(max_budget, cap_sum);
    p.budget = gen.integer(static_cast<int64_t>(n), std::max<int64_t>(static_cast<int64_t>(n), hi));
    return p;
}

// Exhaustive search over every integer vector with 1 <= x_i <= cap_i and
// sum x = C, using per-language score tables.
double brute_force(const alloc::AllocationProblem& p) {
    const auto n = p.size();
    const int64_t budget = p.budget;
    std::vector<std::vector<double>> table(n);
    for (size_t i = 0; i < n; ++i) {
        const int64_t top = std::min(p.caps[i], budget);
        table[i].assign(static_cast<size_t>(top) + 1, -std::numeric_limits<double>::infinity());
        for (int64_t x = 1; x <= top; ++x) table[i][static_cast<size_t>(x)] = p.laws[i].eval(static_cast<double>(x));
    }
    const auto top = [&](size_t i) { return static_cast<int64_t>(table[i].size()) - 1; };
    double best = -std::numeric_limits<double>::infinity();
    if (n == 1) {
        if (budget <= top(0)) best = table[0][static_cast<size_t>(budget)];
    } else if (n == 2) {
        for (int64_t a = std::max<int64_t>(1, budget - top(1)); a <= std::min(top(0), budget - 1); ++a)
            best = std::max(best, table[0][static_cast<size_t>(a)] + table[1][static_cast<size_t>(budget - a)]);
    } else {
        const auto& t1 = table[1];
        const auto& t2 = table[2];
        for (int64_t a = 1; a <= std::min(top(0), budget - 2); ++a) {
            const int64_t rest = budget - a;
            const int64_t lo = std::max<int64_t>(1, rest - top(2));
            const int64_t hi = std::min(top(1), rest - 1);
            double inner = -std::numeric_limits<double>::infinity();
            for (int64_t b = lo; b <= hi; ++b) {
                const double v = t1[static_cast<size_t>(b)] + t2[static_cast<size_t>(rest - b)];
                inner = v > inner ? v : inner;
            }
            best = std::max(best, table[0][static_cast<size_t>(a)] + inner);
        }
    }
    return best / static_cast<double>(n);
}

struct AllocatorRuns {
    std::vector<alloc::AllocationProblem> problems;
    std::vector<alloc::AllocationResult> results;
    double solve_seconds = 0.0;
};

AllocatorRuns allocator_runs() {
    AllocatorRuns runs;
    RandomLaws gen(303);
    for (int i = 0; i < 500; ++i) {
        const size_t n = 1 + static_cast<size_t>(i % 3);
        runs.problems.push_back(random_problem(gen, n, 20000, true));
    }
    for (int i = 0; i < 100; ++i) {
        const auto n = static_cast<size_t>(gen.integer(4, 50));
        auto p = random_problem(gen, n, 1000000000, false);
        p.budget = gen.integer(static_cast<int64_t>(n) * 1000, 1000000000);
        runs.problems.push_back(std::move(p));
    }
    const auto t0 = Clock::now();
    for (const auto& p : runs.problems) runs.results.push_back(alloc::solve(p));
    runs.solve_seconds = seconds_since(t0);
    return runs;
}

void allocator_optimality(Check& c, const AllocatorRuns& runs) {
    int compared = 0;
    int kkt_checked = 0;
    double worst_gap = 0.0;
    double worst_kkt = 0.0;
    const auto t0 = Clock::now();
    for (size_t i = 0; i < runs.problems.size(); ++i) {
        const auto& p = runs.problems[i];
        const auto& r = runs.results[i];
        int64_t sum = 0;
        for (auto x : r.amounts) sum += x;
        c.expect(sum == p.budget, "problem " + std::to_string(i) + " sums to " + std::to_string(sum));
        c.expect(r.objective == alloc::objective(p, r.amounts), "problem " + std::to_string(i) + " objective mismatch");
        if (p.size() <= 3) {
            const double bf = brute_force(p);
            worst_gap = std::max(worst_gap, bf - r.objective);
            c.expect(r.objective >= bf - 1e-9, "problem " + std::to_string(i) + " objective " + fmt(r.objective, 17) +
                                                   " below grid optimum " + fmt(bf, 17));
            ++compared;
        } else {
            c.expect(r.binding_caps.empty(), "problem " + std::to_string(i) + " has binding caps");
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (size_t k = 0; k < p.size(); ++k) {
                const double g = p.laws[k].marginal_gain(r.real_amounts[k]);
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
            const double spread = (hi - lo) / hi;
            worst_kkt = std::max(worst_kkt, spread);
            c.expect(spread <= 1e-6, "problem " + std::to_string(i) + " marginal gains spread " + fmt(spread));
            ++kkt_checked;
        }
    }
    c.expect(runs.solve_seconds < 30.0, "solve took " + fmt(runs.solve_seconds) + " s");
    c.note(std::to_string(compared) + " brute-force comparisons (worst gap " + fmt(worst_gap, 3) + "), " +
           std::to_string(kkt_checked) + " KKT checks (worst spread " + fmt(worst_kkt, 3) + "), solve " +
           fmt(runs.solve_seconds, 3) + " s, oracle " + fmt(seconds_since(t0), 3) + " s");
}

void allocator_dominance(Check& c, const AllocatorRuns& runs) {
    double smallest = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < runs.problems.size(); ++i) {
        const auto u = alloc::uniform_allocation(runs.problems[i]);
        const double margin = runs.results[i].objective - u.objective;
        smallest = std::min(smallest, margin);
        c.expect(margin >= 0.0, "problem " + std::to_string(i) + " uniform beats solve by " + fmt(-margin));
    }
    c.note(std::to_string(runs.problems.size()) + " problems, smallest margin " + fmt(smallest, 3));
}

// 5. Published allocation vectors ---------------------------------------------

void published_allocations(Check& c) {
    auto p = alloc::AllocationProblem::from_json(json::parse(testing::read_file(fixture("allocation/six_languages.json"))));
    struct Row {
        int64_t budget;
        std::vector<int64_t> amounts;
        int64_t tolerance;
    };
    const Row rows[] = {{300000, {41842, 44953, 73002, 59652, 40731, 39816}, 4},
                        {1200000, {183539, 189556, 234233, 242263, 175985, 174422}, 2}};
    for (const auto& row : rows) {
        p.budget = row.budget;
        const auto v = alloc::validate_result(p, row.amounts, row.tolerance);
        c.expect(v.feasible, "budget " + std::to_string(row.budget) + " vector rejected (gap " +
                                 std::to_string(v.sum_gap) + ")");
        for (size_t i = 0; i < p.size(); ++i)
            c.expect(row.amounts[i] <= p.caps[i], p.laws[i].profile().lang.str() + " above its cap");
        c.note("C=" + std::to_string(row.budget) + " gap " + std::to_string(v.sum_gap));
    }
}

// 6. Corpus totals at full size -------------------------------------------------

void corpus_totals(Check& c) {
    TempDir dir;
    struct Corpus {
        const char* name;
        const char* lang;
        int64_t pairs;
    };
    const Corpus corpora[] = {
        {"WikiMatrix", "ar", 999800}, {"WikiMatrix", "el", 620800},  {"WikiMatrix", "hi", 231500},
        {"WikiMatrix", "tr", 477700}, {"WikiMatrix", "vi", 1073800}, {"WikiMatrix", "zh", 786500},
        {"NewsCommentary", "ar", 97400}, {"NewsCommentary", "hi", 2800}, {"NewsCommentary", "zh", 126000},
    };
    json manifest{{"corpora", json::array()}};
    for (const auto& cp : corpora) {
        const bool mined = std::string(cp.name) == "WikiMatrix";
        const std::string file = std::string(cp.name) + "." + cp.lang + ".tsv";
        std::ofstream out(dir / file, std::ios::binary);
        std::string buf;
        for (int64_t i = 0; i < cp.pairs; ++i) {
            if (mined) buf += "1.0625\t";
            buf += "s";
            buf += std::to_string(i);
            buf += "\tt";
            buf += cp.lang;
            buf += std::to_string(i);
            buf += '\n';
            if (buf.size() > (1 << 20)) {
                out << buf;
                buf.clear();
            }
        }
        out << buf;
        manifest["corpora"].push_back({{"corpus_name", cp.name},
                                       {"file_path", file},
                                       {"format", mined ? "wikimatrix_tsv" : "tab_pair"},
                                       {"source_lang", "en"},
                                       {"target_lang", cp.lang},
                                       {"pair_count", cp.pairs}});
    }
    const auto t0 = Clock::now();
    const auto stats = corpus::corpus_stats(corpus::CorpusManifest::from_json(manifest, dir.path()));
    const std::pair<const char*, int64_t> expected[] = {{"ar", 1097200}, {"el", 620800}, {"hi", 234300},
                                                        {"tr", 477700},  {"vi", 1073800}, {"zh", 912500}};
    for (const auto& [lang, total] : expected) {
        const auto it = stats.total_per_lang.find(LangCode(lang));
        const int64_t got = it == stats.total_per_lang.end() ? -1 : it->second;
        c.expect(got == total, std::string(lang) + " total " + std::to_string(got) + " != " + std::to_string(total));
    }
    c.note("Ar " + std::to_string(stats.total_per_lang.at(LangCode("ar"))) + ", Zh " +
           std::to_string(stats.total_per_lang.at(LangCode("zh"))) + ", Hi " +
           std::to_string(stats.total_per_lang.at(LangCode("hi"))) + " in " + fmt(seconds_since(t0), 3) + " s");
}

// 7. BLEU ---------------------------------------------------------------------

void bleu_correctness(Check& c) {
    const auto refs = data::read_lines_file(fixture("bleu/ref.txt"));
    const auto hyp = data::read_lines_file(fixture("bleu/hyp.txt"));
    const double identity = eval::bleu(refs, refs).aggregate;
    c.expect(identity == 100.0, "identity BLEU " + fmt(identity, 17));
    const std::vector<std::string> h{"aa bb cc dd ee ff", "gg hh ii jj"};
    const std::vector<std::string> r{"qq rr ss tt uu vv", "ww xx yy zz"};
    const double disjoint = eval::bleu(h, r).aggregate;
    c.expect(disjoint == 0.0, "disjoint BLEU " + fmt(disjoint, 17));
    // sacrebleu 2.6.0, tokenize="none"
    const double mixed = eval::bleu(hyp, refs).aggregate;
    c.expect(std::abs(mixed - 48.33563776651144) <= 0.01, "mixed BLEU " + fmt(mixed, 17));
    c.note("identity " + fmt(identity) + ", disjoint " + fmt(disjoint) + ", mixed " + fmt(mixed, 10));
}

// 8. Exact match and bootstrap determinism ---------------------------------------

void em_bootstrap(Check& c) {
    const auto items = eval::read_qa_jsonl(fixture("qa/qa_20.jsonl"));
    const auto base = eval::read_qa_jsonl(fixture("qa/qa_20_baseline.jsonl"));
    const auto run = [&] {
        return eval::to_json(eval::with_significance(eval::exact_match(items), eval::exact_match(base), "baseline",
                                                     1000, 17))
            .dump();
    };
    c.expect(run() == run(), "exact-match reports differ between runs");

    std::vector<double> a;
    std::vector<double> b;
    for (const auto& s : eval::ingest_external_scores(fixture("scores/system_a.tsv"), "a").per_item) a.push_back(s.score);
    for (const auto& s : eval::ingest_external_scores(fixture("scores/system_b.tsv"), "b").per_item) b.push_back(s.score);
    const auto r1 = eval::paired_bootstrap(std::span(a).first(12), std::span(b).first(12), 1000, 42);
    const auto r2 = eval::paired_bootstrap(std::span(a).first(12), std::span(b).first(12), 1000, 42);
    c.expect(r1.p_value == r2.p_value && r1.mean_a == r2.mean_a, "bootstrap differs between runs");
    c.expect(r1.p_value == 0.131, "bootstrap p " + fmt(r1.p_value, 17) + " differs from the oracle 0.131");
    const double same = eval::paired_bootstrap(a, a, 1000, 1).p_value;
    c.expect(same == 1.0, "identical systems p " + fmt(same));
    auto worse = a;
    for (auto& x : worse) x -= 1.0;
    const double dom = eval::paired_bootstrap(a, worse, 1000, 1).p_value;
    c.expect(dom == 0.0, "strict domination p " + fmt(dom));
    c.note("p(identical) " + fmt(same) + ", p(dominated) " + fmt(dom));
}

// 9. Dataset build ----------------------------------------------------------------

bool has_non_ascii(const std::string& s) {
    return std::any_of(s.begin(), s.end(), [](char ch) { return static_cast<unsigned char>(ch) >= 0x80; });
}

void dataset_build(Check& c) {
    TempDir dir;
    const auto manifest = corpus::CorpusManifest::load(fixture("corpus_1k/manifest.json"));
    const auto recipe_file = fixture("corpus_1k/recipe.json");
    const auto recipe = data::MixRecipe::from_json(json::parse(testing::read_file(recipe_file)), recipe_file.parent_path());
    data::InstructionDataset first;
    std::vector<std::string> hashes[2];
    for (int run = 0; run < 2; ++run) {
        const auto ds = data::mix(recipe, manifest);
        const auto files = data::write_dataset(ds, dir / ("run" + std::to_string(run)));
        for (const auto& f : {files.train, files.meta, files.provenance}) hashes[run].push_back(cli::sha256_file(f));
        if (run == 0) first = ds;
    }
    c.expect(hashes[0] == hashes[1], "file hashes differ between builds");
    int64_t prov = 0;
    for (const auto& e : first.provenance) prov += e.count;
    c.expect(prov == static_cast<int64_t>(first.records.size()),
             "records " + std::to_string(first.records.size()) + " != provenance sum " + std::to_string(prov));
    int64_t en_to_x = 0;
    int64_t foreign = 0;
    for (const auto& r : first.records) {
        if (r.meta.direction != data::Direction::en_to_x) continue;
        ++en_to_x;
        if (has_non_ascii(r.output) && !has_non_ascii(r.input)) ++foreign;
    }
    c.expect(en_to_x > 0 && foreign == en_to_x,
             std::to_string(foreign) + " of " + std::to_string(en_to_x) + " en_to_x outputs are non-English");
    c.note(std::to_string(first.records.size()) + " records, " + std::to_string(en_to_x) + " en_to_x");
}

// 10. Judge prompts and parser ------------------------------------------------------

void judge_fidelity(Check& c) {
    using namespace polyalign::eval;
    const auto correctness = testing::detex(testing::kCorrectnessLatex);
    const auto pairwise = testing::detex(testing::kPairwiseLatex);
    c.expect(render_correctness_prompt(kContextQuestionSlot, kAnswerSlot) == correctness,
             "correctness prompt differs from the typeset template");
    const std::string cq = "Paris is in France.\nWhere is Paris?";
    auto expected = correctness;
    expected.replace(expected.find(kContextQuestionSlot), kContextQuestionSlot.size(), cq);
    expected.replace(expected.find(kAnswerSlot), kAnswerSlot.size(), "France");
    c.expect(render_correctness_prompt(cq, "France") == expected, "filled correctness prompt differs");
    const auto pw = render_pairwise_prompt("Q", "A1", "A2");
    c.expect(pw.size() >= pairwise.size() && pw.substr(pw.size() - pairwise.size()) == pairwise,
             "pairwise prompt does not end with the typeset instructions");

    std::ifstream in(fixture("judge/mock_responses.jsonl"));
    std::string line;
    int well = 0;
    int well_ok = 0;
    int bad = 0;
    int bad_flagged = 0;
    while (std::getline(in, line)) {
        const auto j = json::parse(line);
        const auto resp = j.at("response").get<std::string>();
        const auto& want = j.at("expected");
        bool ok = false;
        std::optional<bool> yn;
        std::optional<PairScores> ps;
        if (j.at("kind") == "correctness") {
            yn = parse_correctness(resp);
            ok = want.is_null() ? !yn : (yn && *yn == want.get<bool>());
        } else {
            ps = parse_pairwise(resp);
            ok = want.is_null() ? !ps
                                : (ps && ps->assistant_1 == want[0].get<double>() &&
                                   ps->assistant_2 == want[1].get<double>());
        }
        if (want.is_null()) {
            ++bad;
            bad_flagged += ok;
        } else {
            ++well;
            well_ok += ok;
        }
        c.expect(ok, "mock case " + std::to_string(j.at("case").get<int>()));
    }
    c.expect(well + bad == 50, "mock suite has " + std::to_string(well + bad) + " cases");
    c.note(std::to_string(well_ok) + "/" + std::to_string(well) + " well-formed parsed, " + std::to_string(bad_flagged) +
           "/" + std::to_string(bad) + " malformed flagged");
}

// 11. Representation space ----------------------------------------------------------

// Leave-one-out k-NN written out directly: full sort of cosine distances,
// ties by sentence id then language code, vote ties to the smaller code.
double separability_oracle(const rep::LayerDump& d, int k) {
    const auto& r = d.records.records;
    int correct = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        std::vector<std::tuple<double, int64_t, std::string>> nb;
        for (size_t j = 0; j < r.size(); ++j) {
            if (j == i) continue;
            nb.emplace_back(1.0 - cosine(r[i].vector, r[j].vector), r[j].sentence_id, r[j].lang.str());
        }
        std::sort(nb.begin(), nb.end());
        std::map<std::string, int> votes;
        for (int t = 0; t < k; ++t) ++votes[std::get<2>(nb[static_cast<size_t>(t)])];
        std::string best;
        int best_n = -1;
        for (const auto& [lang, n] : votes) {
            if (n > best_n) {
                best = lang;
                best_n = n;
            }
        }
        correct += best == r[i].lang.str();
    }
    return static_cast<double>(correct) / static_cast<double>(r.size());
}

void repspace_oracles(Check& c) {
    const auto layers = rep::split_layers(EmbeddingDump::load(fixture("embeddings/layers_40.jsonl")));
    // brute-force values computed independently in Python
    const double frozen[2][3] = {{0.65, 0.65, 0.7}, {1.0, 1.0, 1.0}};
    for (size_t l = 0; l < 2; ++l) {
        int col = 0;
        for (int k : {1, 3, 5}) {
            const double got = rep::separability(layers[l], k);
            c.expect(got == separability_oracle(layers[l], k) && got == frozen[l][col],
                     "layer " + std::to_string(l) + " k=" + std::to_string(k) + " separability " + fmt(got));
            ++col;
        }
    }

    const auto pca = rep::project_2d(rep::split_layers(EmbeddingDump::load(fixture("embeddings/pca_5.jsonl")))[0]);
    // numpy eigh of the sample covariance
    const double x[] = {1.9090113394422543, -0.6390956437460463, -1.2526659750248765, 2.2656657308680233,
                        -2.282915451539355};
    const double y[] = {-0.0536027072216163, 2.183262375319902, -1.6336282040156702, -0.3695980448112148,
                        -0.1264334192714006};
    double worst = 0.0;
    for (size_t i = 0; i < 5; ++i) {
        worst = std::max({worst, std::abs(pca.points[i].x - x[i]), std::abs(pca.points[i].y - y[i])});
    }
    c.expect(pca.points.size() == 5 && worst <= 1e-8, "PCA coordinates off by " + fmt(worst));

    rep::LayerDump twins;
    for (int i = 0; i < 12; ++i) {
        const std::vector<double> v{std::sin(0.9 * i), std::cos(1.3 * i), 0.2 * i - 1.0, 1.0};
        twins.records.records.push_back({LangCode("en"), i, v, 0});
        twins.records.records.push_back({LangCode("zh"), i, v, 0});
    }
    const double align = rep::alignment_score(twins).overall;
    c.expect(std::abs(align - 1.0) <= 1e-12, "identical-cloud alignment " + fmt(align, 17));
    c.note("PCA max deviation " + fmt(worst, 3) + ", identical alignment " + fmt(align, 17));
}

// 12. End-to-end CLI pipeline --------------------------------------------------------

std::string fx(const char* rel) { return fixture(rel).string(); }

bool manifest_complete(const fs::path& run_dir, std::string& why) {
    const auto path = run_dir / "manifest.json";
    if (!fs::exists(path)) {
        why = "no manifest in " + run_dir.filename().string();
        return false;
    }
    const auto m = json::parse(testing::read_file(path));
    for (const char* key : {"tool", "version", "subcommand", "config", "inputs", "outputs", "libraries"}) {
        if (!m.contains(key)) {
            why = run_dir.filename().string() + " manifest lacks " + key;
            return false;
        }
    }
    if (m.at("outputs").empty()) {
        why = run_dir.filename().string() + " manifest lists no outputs";
        return false;
    }
    for (const auto& o : m.at("outputs")) {
        const auto f = run_dir / o.at("file").get<std::string>();
        if (!fs::exists(f) || cli::sha256_file(f) != o.at("sha256")) {
            why = run_dir.filename().string() + " output hash mismatch for " + f.filename().string();
            return false;
        }
    }
    for (const auto& in : m.at("inputs")) {
        if (!fs::exists(in.at("path").get<std::string>()) || in.at("sha256").get<std::string>().size() != 64) {
            why = run_dir.filename().string() + " input record incomplete";
            return false;
        }
    }
    return true;
}

void pipeline(Check& c) {
    std::string build_hash[2];
    double worst = 0.0;
    for (int round = 0; round < 2; ++round) {
        TempDir dir;
        const auto cfg = [&](const std::string& name, const json& j) {
            testing::write_file(dir / (name + ".json"), j.dump(2));
            return (dir / (name + ".json")).string();
        };
        const auto t0 = Clock::now();
        const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
            {"stats", {"stats", "--config", cfg("stats", {{"manifest", fx("corpus_1k/manifest.json")}})}},
            {"similarity",
             {"similarity", "--config", cfg("similarity", {{"embeddings", fx("corpus_1k/embeddings.jsonl")}})}},
            {"fit",
             {"fit", "--config",
              cfg("fit", {{"series",
                           {{"zh", fx("corpus_1k/fit_points_zh.tsv")}, {"ar", fx("corpus_1k/fit_points_ar.tsv")}}},
                          {"profiles", (dir / "similarity/profiles.json").string()}})}},
            {"allocate",
             {"allocate", "--config",
              cfg("allocate", {{"laws", (dir / "fit/laws.json").string()},
                               {"stats", (dir / "stats/stats.json").string()},
                               {"budget", 350}})}},
            {"build",
             {"build", "--config",
              cfg("build", {{"manifest", fx("corpus_1k/manifest.json")},
                            {"recipe", fx("corpus_1k/recipe.json")},
                            {"allocation", (dir / "allocate/allocation.json").string()}})}},
            {"bleu",
             {"bleu", "--config",
              cfg("bleu", {{"hypotheses", fx("bleu/hyp.txt")}, {"references", fx("bleu/ref.txt")}})}},
        };
        bool ok = true;
        for (auto [name, args] : steps) {
            args.push_back("--out-dir");
            args.push_back((dir / name).string());
            const auto r = testing::run_cli(args, dir.path());
            c.expect(r.exit_code == 0, name + " exited " + std::to_string(r.exit_code) + ": " + r.err);
            std::string why;
            const bool complete = r.exit_code == 0 && manifest_complete(dir / name, why);
            if (r.exit_code == 0) c.expect(complete, why);
            ok = ok && complete;
            if (!ok) break;
        }
        const double secs = seconds_since(t0);
        worst = std::max(worst, secs);
        c.expect(secs < 60.0, "pipeline took " + fmt(secs) + " s");
        if (ok) build_hash[round] = cli::sha256_file(dir / "build/train.json");
    }
    c.expect(!build_hash[0].empty() && build_hash[0] == build_hash[1], "build output differs between pipeline runs");
    c.note("slowest run " + fmt(worst, 3) + " s");
}

}  // namespace

int main() {
    const AllocatorRuns runs = allocator_runs();
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"scaling-law round trip", scaling_round_trip},
        {"marginal gain vs finite differences", derivative_check},
        {"allocator optimality", [&](Check& c) { allocator_optimality(c, runs); }},
        {"allocator dominates uniform", [&](Check& c) { allocator_dominance(c, runs); }},
        {"published allocation vectors", published_allocations},
        {"corpus totals", corpus_totals},
        {"BLEU correctness", bleu_correctness},
        {"exact match and bootstrap determinism", em_bootstrap},
        {"dataset build determinism and conservation", dataset_build},
        {"judge prompt fidelity and parser", judge_fidelity},
        {"representation-space oracles", repspace_oracles},
        {"end-to-end CLI pipeline", pipeline},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        Check c;
        try {
            fn(c);
        } catch (const std::exception& ex) {
            c.failures.push_back(std::string("exception: ") + ex.what());
        }
        const bool pass = c.failures.empty();
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << index << ". " << name;
        if (!c.info.empty()) std::cout << " (" << c.info << ")";
        std::cout << '\n';
        for (const auto& f : c.failures) {
            if (!f.empty()) std::cout << "      " << f << '\n';
        }
        if (c.failures.size() > 5) std::cout << "      ... " << c.failures.size() - 5 << " more\n";
        std::cout.flush();
    }
    std::cout << (criteria.size() - static_cast<size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
