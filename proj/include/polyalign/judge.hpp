#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyalign/metrics.hpp"

namespace polyalign::eval {

// Judge prompt templates. Placeholders are substituted verbatim; everything
// else is sent byte for byte.
extern const std::string_view kCorrectnessTemplate;
extern const std::string_view kPairwiseInstructions;
inline constexpr std::string_view kContextQuestionSlot = "<Context & Question>";
inline constexpr std::string_view kAnswerSlot = "<Answer>";

/// Context, a newline, then the question.
std::string context_and_question(const QAItem& item);

std::string render_correctness_prompt(std::string_view context_and_question, std::string_view answer);

/// Question and both answers framed above the fixed rating instructions.
std::string render_pairwise_prompt(std::string_view question, std::string_view answer_1, std::string_view answer_2);

/// First standalone YES/NO (case-insensitive) after the last
/// "Evaluation Form" marker, else anywhere in the response.
std::optional<bool> parse_correctness(std::string_view response);

struct PairScores {
    double assistant_1;
    double assistant_2;
};

/// "Score of the Assistant 1: <s>" and "... 2: <s>" lines, each score in [1, 10].
std::optional<PairScores> parse_pairwise(std::string_view response);

enum class VerdictKind { correctness_yes_no, pairwise_scores };
enum class Outcome { a_wins, tie, b_wins };

struct JudgeVerdict {
    std::string id;
    VerdictKind kind = VerdictKind::correctness_yes_no;
    std::optional<bool> correct;
    std::optional<double> score_a;
    std::optional<double> score_b;
    std::string raw_response;
    int attempts = 0;
    /// Last transport error, if the final attempt failed to connect.
    std::string error;

    bool parsed() const {
        return kind == VerdictKind::correctness_yes_no ? correct.has_value() : (score_a && score_b);
    }
    std::optional<Outcome> outcome() const;
};

struct TransportReply {
    bool ok = false;
    std::string text;
    /// Worth retrying (timeouts, connection errors, 429, 5xx).
    bool transient = false;
    int status = 0;
    std::string error;
};

/// Sends one prompt and returns the model's text. Implementations must be
/// safe to call from several threads at once.
class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportReply complete(const std::string& prompt) = 0;
    virtual std::string describe() const = 0;
};

/// Replays fixed replies in call order, wrapping around at the end. Used for
/// offline dry runs and tests.
class ScriptedTransport : public Transport {
public:
    explicit ScriptedTransport(std::vector<TransportReply> replies);

    /// One JSON object per line: {"response": "..."} or
    /// {"error": "...", "transient": true}.
    static std::vector<TransportReply> load_replies(const std::filesystem::path& path);

    TransportReply complete(const std::string& prompt) override;
    std::string describe() const override;
    size_t calls() const;

private:
    std::vector<TransportReply> replies_;
    mutable std::mutex mutex_;
    size_t next_ = 0;
};

struct HttpTransportConfig {
    /// e.g. https://api.example.com/v1/chat/completions
    std::string endpoint;
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::chrono::milliseconds timeout{60000};
};

/// Chat-completion style JSON endpoint:
/// POST {"model", "temperature", "messages": [{"role": "user", "content": prompt}]}
/// and read choices[0].message.content.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(HttpTransportConfig config);

    /// Endpoint from JUDGE_ENDPOINT and credential from JUDGE_API_KEY.
    static HttpTransportConfig config_from_env();

    TransportReply complete(const std::string& prompt) override;
    std::string describe() const override;

private:
    HttpTransportConfig config_;
    std::string origin_;
    std::string path_;
};

struct JudgeOptions {
    int max_attempts = 4;
    std::chrono::milliseconds base_backoff{500};
    std::chrono::milliseconds max_backoff{8000};
    unsigned max_in_flight = 4;
    /// Judge only the first N items.
    std::optional<size_t> first_n;
    /// Request/response audit trail, one JSON object per attempt.
    std::optional<std::filesystem::path> audit_log;
    uint64_t jitter_seed = 0;
};

struct CorrectnessSummary {
    int64_t judged = 0;
    int64_t correct = 0;
    int64_t unparseable = 0;
    /// correct / (judged - unparseable); unparseable verdicts are excluded.
    double accuracy = 0.0;
};

struct PairwiseSummary {
    int64_t wins = 0;
    int64_t ties = 0;
    int64_t losses = 0;
    int64_t unparseable = 0;
    double win_rate = 0.0;
    double tie_rate = 0.0;
    double loss_rate = 0.0;
};

struct PairwiseItem {
    std::string id;
    std::string question;
    std::string answer_a;
    std::string answer_b;
};

/// One JSON object per line: {"id", "question", "answer_a", "answer_b"}.
std::vector<PairwiseItem> read_pairwise_jsonl(const std::filesystem::path& path);

/// Issues judge requests with at most max_in_flight concurrent calls,
/// retrying transient failures and unparseable replies with jittered
/// exponential backoff. Verdicts come back in input order.
class JudgeClient {
public:
    JudgeClient(Transport& transport, JudgeOptions options);
    ~JudgeClient();

    std::vector<JudgeVerdict> judge_correctness(std::span<const QAItem> items);
    JudgeVerdict judge_pairwise(const PairwiseItem& item);
    std::vector<JudgeVerdict> judge_pairwise(std::span<const PairwiseItem> items);

private:
    JudgeVerdict run_one(const std::string& id, VerdictKind kind, const std::string& prompt);
    template <typename Fn>
    std::vector<JudgeVerdict> run_all(size_t count, Fn make);
    void audit(const std::string& id, int attempt, const std::string& prompt, const TransportReply& reply,
               std::chrono::milliseconds elapsed);
    std::chrono::milliseconds backoff(int attempt);

    Transport& transport_;
    JudgeOptions options_;
    std::mutex mutex_;
    std::ofstream audit_;
    uint64_t jitter_state_;
};

CorrectnessSummary summarize_correctness(std::span<const JudgeVerdict> verdicts);
PairwiseSummary summarize_pairwise(std::span<const JudgeVerdict> verdicts);

nlohmann::json to_json(const JudgeVerdict& verdict);
nlohmann::json to_json(const CorrectnessSummary& summary);
nlohmann::json to_json(const PairwiseSummary& summary);

}  // namespace polyalign::eval
