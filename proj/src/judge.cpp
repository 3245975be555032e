#include "polyalign/judge.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "polyalign/prng.hpp"

namespace polyalign::eval {

constexpr std::string_view kCorrectnessText =
    "You will be given a context followed by question. You will then be given one potential answer to the "
    "question.\n"
    "Your task is to tell if the answer is correct.\n"
    "Please make sure you read and understand these instructions carefully. Please keep this document open while "
    "reviewing, and refer to it as needed.\n"
    "\n"
    "Evaluation Criteria:\n"
    "Correctness (YES or NO): Is the answer correct?\n"
    "YES means the answer provides an accurate and valid response that aligns with the facts, logic, and "
    "requirements of the question. The answer should be in the same language as the context.\n"
    "NO means otherwise.\n"
    "\n"
    "Context: <Context & Question>\n"
    "Answer: <Answer>\n"
    "\n"
    "Evaluation Form (YES or NO):\n";

constexpr std::string_view kPairwiseText =
    "We would like to request your feedback on the performance of two AI assistants in response to the user "
    "question displayed above.\n"
    "Please rate the helpfulness, relevance, accuracy, level of details of their responses.\n"
    "\n"
    "Each assistant receives an overall score on a scale of 1 to 10, where a higher score indicates better overall "
    "performance.\n"
    "Please first provide a comprehensive explanation of your evaluation, avoiding any potential bias and ensuring "
    "that the order in which the responses were presented does not affect your judgment.\n"
    "Then, output two lines indicating the scores for Assistant 1 and 2, respectively.\n"
    "\n"
    "Output with the following format:\n"
    "Evaluation evidence: <Explanation>\n"
    "Score of the Assistant 1: <Score>\n"
    "Score of the Assistant 2: <Score>\n";

const std::string_view kCorrectnessTemplate = kCorrectnessText;
const std::string_view kPairwiseInstructions = kPairwiseText;

std::string context_and_question(const QAItem& item) {
    return item.context + "\n" + item.question;
}

namespace {

void replace_once(std::string& s, std::string_view slot, std::string_view value) {
    const auto pos = s.find(slot);
    if (pos == std::string::npos) throw Error("prompt template lacks slot " + std::string(slot));
    s.replace(pos, slot.size(), value);
}

char lower_ascii(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) || c == '_');
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](char c) { return lower_ascii(c); });
    return out;
}

std::optional<bool> first_yes_no(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        if (!is_word_byte(s[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < s.size() && is_word_byte(s[j])) ++j;
        const auto word = lower_ascii(s.substr(i, j - i));
        if (word == "yes") return true;
        if (word == "no") return false;
        i = j;
    }
    return std::nullopt;
}

}  // namespace

std::string render_correctness_prompt(std::string_view cq, std::string_view answer) {
    // substitute the answer first so a "<Answer>" inside the context stays literal
    std::string out(kCorrectnessText);
    replace_once(out, kAnswerSlot, answer);
    replace_once(out, kContextQuestionSlot, cq);
    return out;
}

std::string render_pairwise_prompt(std::string_view question, std::string_view answer_1, std::string_view answer_2) {
    std::string out;
    out.reserve(question.size() + answer_1.size() + answer_2.size() + kPairwiseText.size() + 256);
    out += "[Question]\n";
    out += question;
    out += "\n\n[The Start of Assistant 1's Answer]\n";
    out += answer_1;
    out += "\n\n[The End of Assistant 1's Answer]\n\n[The Start of Assistant 2's Answer]\n";
    out += answer_2;
    out += "\n\n[The End of Assistant 2's Answer]\n\n";
    out += kPairwiseText;
    return out;
}

std::optional<bool> parse_correctness(std::string_view response) {
    // an echoed "(YES or NO)" from the form header is never the verdict
    std::string text(response);
    const auto lower = lower_ascii(response);
    constexpr std::string_view echo = "(yes or no)";
    for (auto p = lower.find(echo); p != std::string::npos; p = lower.find(echo, p + echo.size()))
        text.replace(p, echo.size(), echo.size(), ' ');
    constexpr std::string_view marker = "evaluation form";
    const auto pos = lower.rfind(marker);
    if (pos != std::string::npos) {
        if (auto v = first_yes_no(std::string_view(text).substr(pos + marker.size()))) return v;
    }
    return first_yes_no(text);
}

std::optional<PairScores> parse_pairwise(std::string_view response) {
    static const std::regex line_re(R"(score\s+of\s+(?:the\s+)?assistant\s*([12])\s*:\s*([-+]?[0-9]+(?:\.[0-9]+)?))",
                                    std::regex::icase);
    std::optional<double> s1;
    std::optional<double> s2;
    const std::string text(response);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), line_re); it != std::sregex_iterator(); ++it) {
        const double v = std::stod((*it)[2].str());
        ((*it)[1].str() == "1" ? s1 : s2) = v;
    }
    if (!s1 || !s2) return std::nullopt;
    if (*s1 < 1.0 || *s1 > 10.0 || *s2 < 1.0 || *s2 > 10.0) return std::nullopt;
    return PairScores{*s1, *s2};
}

std::optional<Outcome> JudgeVerdict::outcome() const {
    if (kind != VerdictKind::pairwise_scores || !score_a || !score_b) return std::nullopt;
    if (*score_a > *score_b) return Outcome::a_wins;
    if (*score_a < *score_b) return Outcome::b_wins;
    return Outcome::tie;
}

ScriptedTransport::ScriptedTransport(std::vector<TransportReply> replies) : replies_(std::move(replies)) {
    if (replies_.empty()) throw InputError("scripted transport needs at least one reply");
}

std::vector<TransportReply> ScriptedTransport::load_replies(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read scripted replies " + path.string());
    std::vector<TransportReply> replies;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TransportReply r;
            if (j.contains("response")) {
                r.ok = true;
                r.status = 200;
                r.text = j["response"].get<std::string>();
            } else {
                r.error = j.at("error").get<std::string>();
                r.transient = j.value("transient", true);
            }
            replies.push_back(std::move(r));
        } catch (const nlohmann::json::exception& ex) {
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    if (replies.empty()) throw InputError(path.string() + " holds no scripted replies");
    return replies;
}

TransportReply ScriptedTransport::complete(const std::string&) {
    std::lock_guard lock(mutex_);
    return replies_[next_++ % replies_.size()];
}

std::string ScriptedTransport::describe() const {
    return "scripted:" + std::to_string(replies_.size()) + " replies";
}

size_t ScriptedTransport::calls() const {
    std::lock_guard lock(mutex_);
    return next_;
}

std::vector<PairwiseItem> read_pairwise_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read pairwise items from " + path.string());
    std::vector<PairwiseItem> items;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto& id = j.at("id");
            items.push_back({id.is_string() ? id.get<std::string>() : id.dump(), j.at("question").get<std::string>(),
                             j.at("answer_a").get<std::string>(), j.at("answer_b").get<std::string>()});
        } catch (const nlohmann::json::exception& ex) {
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return items;
}

HttpTransport::HttpTransport(HttpTransportConfig config) : config_(std::move(config)) {
    static const std::regex url_re(R"(^(https?)://([^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url_re))
        throw ConfigError("judge endpoint must be an http(s) URL, got '" + config_.endpoint + "'");
    origin_ = m[1].str() + "://" + m[2].str();
    path_ = m[3].matched ? m[3].str() : "/";
}

HttpTransportConfig HttpTransport::config_from_env() {
    HttpTransportConfig config;
    const char* endpoint = std::getenv("JUDGE_ENDPOINT");
    const char* key = std::getenv("JUDGE_API_KEY");
    if (endpoint == nullptr || *endpoint == '\0') throw ConfigError("JUDGE_ENDPOINT is not set");
    if (key == nullptr || *key == '\0') throw ConfigError("JUDGE_API_KEY is not set");
    config.endpoint = endpoint;
    config.api_key = key;
    return config;
}

std::string HttpTransport::describe() const {
    return "http:" + origin_ + path_ + " model=" + config_.model;
}

TransportReply HttpTransport::complete(const std::string& prompt) {
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout).count() % 1000000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_bearer_token_auth(config_.api_key);

    const nlohmann::json body{{"model", config_.model},
                              {"temperature", config_.temperature},
                              {"messages", {{{"role", "user"}, {"content", prompt}}}}};
    TransportReply reply;
    const auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        reply.transient = true;
        reply.error = "request failed: " + httplib::to_string(res.error());
        return reply;
    }
    reply.status = res->status;
    if (res->status == 429 || res->status >= 500) {
        reply.transient = true;
        reply.error = "HTTP " + std::to_string(res->status);
        reply.text = res->body;
        return reply;
    }
    if (res->status != 200) {
        reply.error = "HTTP " + std::to_string(res->status);
        reply.text = res->body;
        return reply;
    }
    try {
        const auto j = nlohmann::json::parse(res->body);
        reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        reply.ok = true;
    } catch (const std::exception& ex) {
        reply.error = std::string("malformed completion body: ") + ex.what();
        reply.text = res->body;
    }
    return reply;
}

JudgeClient::JudgeClient(Transport& transport, JudgeOptions options)
    : transport_(transport), options_(std::move(options)), jitter_state_(options_.jitter_seed) {
    if (options_.max_attempts < 1) throw ConfigError("judge max_attempts must be >= 1");
    if (options_.max_in_flight < 1) throw ConfigError("judge max_in_flight must be >= 1");
    if (options_.audit_log) {
        audit_.open(*options_.audit_log, std::ios::binary | std::ios::app);
        if (!audit_) throw InputError("cannot open audit log " + options_.audit_log->string());
    }
}

JudgeClient::~JudgeClient() = default;

void JudgeClient::audit(const std::string& id, int attempt, const std::string& prompt, const TransportReply& reply,
                        std::chrono::milliseconds elapsed) {
    if (!audit_.is_open()) return;
    const nlohmann::json j{{"id", id},
                           {"attempt", attempt},
                           {"transport", transport_.describe()},
                           {"request", prompt},
                           {"ok", reply.ok},
                           {"status", reply.status},
                           {"transient", reply.transient},
                           {"error", reply.error},
                           {"response", reply.text},
                           {"elapsed_ms", elapsed.count()}};
    std::lock_guard lock(mutex_);
    audit_ << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    audit_.flush();
}

std::chrono::milliseconds JudgeClient::backoff(int attempt) {
    double u = 0.0;
    {
        std::lock_guard lock(mutex_);
        jitter_state_ = derive_seed(jitter_state_, "judge-backoff");
        u = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
    }
    const double base = static_cast<double>(options_.base_backoff.count()) * std::ldexp(1.0, attempt - 1);
    const double capped = std::min(base, static_cast<double>(options_.max_backoff.count()));
    return std::chrono::milliseconds(static_cast<int64_t>(capped * (0.5 + 0.5 * u)));
}

JudgeVerdict JudgeClient::run_one(const std::string& id, VerdictKind kind, const std::string& prompt) {
    JudgeVerdict v;
    v.id = id;
    v.kind = kind;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        v.attempts = attempt;
        const auto t0 = std::chrono::steady_clock::now();
        TransportReply reply;
        try {
            reply = transport_.complete(prompt);
        } catch (const std::exception& ex) {
            reply.transient = true;
            reply.error = ex.what();
        }
        audit(id, attempt, prompt, reply,
              std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0));
        bool retry = false;
        if (reply.ok) {
            v.raw_response = reply.text;
            v.error.clear();
            if (kind == VerdictKind::correctness_yes_no) {
                v.correct = parse_correctness(reply.text);
            } else if (const auto s = parse_pairwise(reply.text)) {
                v.score_a = s->assistant_1;
                v.score_b = s->assistant_2;
            }
            retry = !v.parsed();
        } else {
            v.error = reply.error;
            if (!reply.text.empty()) v.raw_response = reply.text;
            retry = reply.transient;
        }
        if (!retry) break;
        if (attempt < options_.max_attempts) std::this_thread::sleep_for(backoff(attempt));
    }
    return v;
}

template <typename Fn>
std::vector<JudgeVerdict> JudgeClient::run_all(size_t count, Fn make) {
    if (options_.first_n) count = std::min(count, *options_.first_n);
    std::vector<JudgeVerdict> out(count);
    std::atomic<size_t> next{0};
    const unsigned workers = static_cast<unsigned>(std::min<size_t>(options_.max_in_flight, std::max<size_t>(count, 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < count; i = next++) {
                    const auto [id, kind, prompt] = make(i);
                    out[i] = run_one(id, kind, prompt);
                }
            });
        }
    }
    return out;
}

std::vector<JudgeVerdict> JudgeClient::judge_correctness(std::span<const QAItem> items) {
    return run_all(items.size(), [&](size_t i) {
        const auto& item = items[i];
        return std::tuple{item.id, VerdictKind::correctness_yes_no,
                          render_correctness_prompt(context_and_question(item), item.hypothesis)};
    });
}

JudgeVerdict JudgeClient::judge_pairwise(const PairwiseItem& item) {
    return run_one(item.id, VerdictKind::pairwise_scores,
                   render_pairwise_prompt(item.question, item.answer_a, item.answer_b));
}

std::vector<JudgeVerdict> JudgeClient::judge_pairwise(std::span<const PairwiseItem> items) {
    return run_all(items.size(), [&](size_t i) {
        const auto& item = items[i];
        return std::tuple{item.id, VerdictKind::pairwise_scores,
                          render_pairwise_prompt(item.question, item.answer_a, item.answer_b)};
    });
}

CorrectnessSummary summarize_correctness(std::span<const JudgeVerdict> verdicts) {
    CorrectnessSummary s;
    s.judged = static_cast<int64_t>(verdicts.size());
    for (const auto& v : verdicts) {
        if (!v.correct) ++s.unparseable;
        else if (*v.correct) ++s.correct;
    }
    const auto usable = s.judged - s.unparseable;
    s.accuracy = usable > 0 ? static_cast<double>(s.correct) / static_cast<double>(usable) : 0.0;
    return s;
}

PairwiseSummary summarize_pairwise(std::span<const JudgeVerdict> verdicts) {
    PairwiseSummary s;
    for (const auto& v : verdicts) {
        const auto o = v.outcome();
        if (!o) ++s.unparseable;
        else if (*o == Outcome::a_wins) ++s.wins;
        else if (*o == Outcome::b_wins) ++s.losses;
        else ++s.ties;
    }
    const auto usable = static_cast<double>(s.wins + s.ties + s.losses);
    if (usable > 0) {
        s.win_rate = s.wins / usable;
        s.tie_rate = s.ties / usable;
        s.loss_rate = s.losses / usable;
    }
    return s;
}

nlohmann::json to_json(const JudgeVerdict& v) {
    nlohmann::json j{{"id", v.id},
                     {"kind", v.kind == VerdictKind::correctness_yes_no ? "correctness_yes_no" : "pairwise_scores"},
                     {"parsed", v.parsed()},
                     {"attempts", v.attempts},
                     {"raw_response", v.raw_response}};
    j["correct"] = v.correct ? nlohmann::json(*v.correct) : nlohmann::json(nullptr);
    j["score_a"] = v.score_a ? nlohmann::json(*v.score_a) : nlohmann::json(nullptr);
    j["score_b"] = v.score_b ? nlohmann::json(*v.score_b) : nlohmann::json(nullptr);
    if (const auto o = v.outcome())
        j["outcome"] = *o == Outcome::a_wins ? "a_wins" : (*o == Outcome::b_wins ? "b_wins" : "tie");
    if (!v.error.empty()) j["error"] = v.error;
    return j;
}

nlohmann::json to_json(const CorrectnessSummary& s) {
    return {{"judged", s.judged}, {"correct", s.correct}, {"unparseable", s.unparseable}, {"accuracy", s.accuracy}};
}

nlohmann::json to_json(const PairwiseSummary& s) {
    return {{"wins", s.wins},         {"ties", s.ties},         {"losses", s.losses},
            {"unparseable", s.unparseable}, {"win_rate", s.win_rate}, {"tie_rate", s.tie_rate},
            {"loss_rate", s.loss_rate}};
}

}  // namespace polyalign::eval
