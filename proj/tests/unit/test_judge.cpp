#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "judge_latex.hpp"
#include "polyalign/judge.hpp"
#include "test_util.hpp"

using namespace polyalign;
using namespace polyalign::eval;
using polyalign::testing::detex;
using polyalign::testing::fixture;
using polyalign::testing::kCorrectnessLatex;
using polyalign::testing::kPairwiseLatex;
using polyalign::testing::read_file;
using polyalign::testing::TempDir;

namespace {

std::vector<TransportReply> replies(std::initializer_list<const char*> texts) {
    std::vector<TransportReply> out;
    for (const char* t : texts) out.push_back({true, t, false, 200, ""});
    return out;
}

TransportReply transient_failure() { return {false, "", true, 503, "HTTP 503"}; }

JudgeOptions fast_options() {
    JudgeOptions o;
    o.base_backoff = std::chrono::milliseconds(1);
    o.max_backoff = std::chrono::milliseconds(4);
    return o;
}

QAItem qa(std::string id) { return QAItem{std::move(id), "ctx", "q?", "ref", "hyp", "en"}; }

}  // namespace

TEST(JudgePrompt, TemplatesMatchTypesetSource) {
    EXPECT_EQ(std::string(kCorrectnessTemplate), detex(kCorrectnessLatex));
    EXPECT_EQ(std::string(kPairwiseInstructions), detex(kPairwiseLatex));
}

TEST(JudgePrompt, ShippedTemplateFilesMatch) {
    const std::filesystem::path root(POLYALIGN_SOURCE_DIR);
    EXPECT_EQ(read_file(root / "prompts/judge_correctness.txt"), std::string(kCorrectnessTemplate));
    EXPECT_EQ(read_file(root / "prompts/judge_pairwise.txt"), std::string(kPairwiseInstructions));
}

TEST(JudgePrompt, CorrectnessRenderIsTemplateModuloSlots) {
    const std::string cq = "The Broncos won.\nWho won?";
    const std::string answer = "The Broncos";
    const auto rendered = render_correctness_prompt(cq, answer);
    std::string expected(kCorrectnessTemplate);
    expected.replace(expected.find(kContextQuestionSlot), kContextQuestionSlot.size(), cq);
    expected.replace(expected.find(kAnswerSlot), kAnswerSlot.size(), answer);
    EXPECT_EQ(rendered, expected);
}

TEST(JudgePrompt, SlotTextInsideValuesStaysLiteral) {
    const auto r = render_correctness_prompt("ctx <Answer> here", "ans <Context & Question>");
    EXPECT_NE(r.find("Context: ctx <Answer> here\n"), std::string::npos);
    EXPECT_NE(r.find("Answer: ans <Context & Question>\n"), std::string::npos);
}

TEST(JudgePrompt, ContextAndQuestionJoinedByNewline) {
    EXPECT_EQ(context_and_question(QAItem{"1", "C", "Q", "", "", "en"}), "C\nQ");
}

TEST(JudgePrompt, PairwiseRenderEndsWithInstructions) {
    const auto r = render_pairwise_prompt("What?", "One", "Two");
    ASSERT_GE(r.size(), kPairwiseInstructions.size());
    EXPECT_EQ(r.substr(r.size() - kPairwiseInstructions.size()), kPairwiseInstructions);
    EXPECT_EQ(r.rfind("[Question]\nWhat?\n\n[The Start of Assistant 1's Answer]\nOne\n\n", 0), 0u);
    EXPECT_NE(r.find("[The Start of Assistant 2's Answer]\nTwo\n\n[The End of Assistant 2's Answer]"),
              std::string::npos);
}

// 50 mock responses: 20 well-formed and 5 malformed YES/NO replies,
// 15 well-formed and 10 malformed score replies.
TEST(JudgeParse, MockSuite) {
    std::ifstream in(fixture("judge/mock_responses.jsonl"));
    std::string line;
    int cases = 0;
    int well_formed = 0;
    int malformed = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        const auto response = j.at("response").get<std::string>();
        const auto& expected = j.at("expected");
        SCOPED_TRACE("case " + std::to_string(j.at("case").get<int>()) + ": " + response);
        if (j.at("kind") == "correctness") {
            const auto v = parse_correctness(response);
            if (expected.is_null()) {
                EXPECT_FALSE(v.has_value());
                ++malformed;
            } else {
                ASSERT_TRUE(v.has_value());
                EXPECT_EQ(*v, expected.get<bool>());
                ++well_formed;
            }
        } else {
            const auto v = parse_pairwise(response);
            if (expected.is_null()) {
                EXPECT_FALSE(v.has_value());
                ++malformed;
            } else {
                ASSERT_TRUE(v.has_value());
                EXPECT_EQ(v->assistant_1, expected[0].get<double>());
                EXPECT_EQ(v->assistant_2, expected[1].get<double>());
                ++well_formed;
            }
        }
        ++cases;
    }
    EXPECT_EQ(cases, 50);
    EXPECT_EQ(well_formed, 35);
    EXPECT_EQ(malformed, 15);
}

TEST(JudgeParse, CorrectnessDetails) {
    EXPECT_EQ(parse_correctness("Evaluation Form (YES or NO): yes"), true);
    EXPECT_EQ(parse_correctness("Evaluation Form (YES or NO):\nNO."), false);
    EXPECT_EQ(parse_correctness("No doubt. Evaluation Form: YES"), true);
    EXPECT_EQ(parse_correctness("Yesterday it was fine"), std::nullopt);
    EXPECT_EQ(parse_correctness("Nobody knows"), std::nullopt);
    EXPECT_EQ(parse_correctness(""), std::nullopt);
}

TEST(JudgeParse, PairwiseDetails) {
    const auto p = parse_pairwise("score of assistant 1: 7.5\nScore of the Assistant 2:9");
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(p->assistant_1, 7.5);
    EXPECT_EQ(p->assistant_2, 9);
    EXPECT_FALSE(parse_pairwise("Score of the Assistant 1: 7").has_value());
    EXPECT_FALSE(parse_pairwise("Score of the Assistant 1: 11\nScore of the Assistant 2: 3").has_value());
    // a template echo followed by real scores: the last occurrence wins
    const auto echo = parse_pairwise(
        "Score of the Assistant 1: <Score>\nScore of the Assistant 2: <Score>\n"
        "Score of the Assistant 1: 4\nScore of the Assistant 2: 6");
    ASSERT_TRUE(echo.has_value());
    EXPECT_EQ(echo->assistant_1, 4);
}

TEST(JudgeVerdict, Outcomes) {
    JudgeVerdict v;
    v.kind = VerdictKind::pairwise_scores;
    v.score_a = 8;
    v.score_b = 6;
    EXPECT_EQ(v.outcome(), Outcome::a_wins);
    v.score_b = 8;
    EXPECT_EQ(v.outcome(), Outcome::tie);
    v.score_b = 9;
    EXPECT_EQ(v.outcome(), Outcome::b_wins);
    v.score_b.reset();
    EXPECT_FALSE(v.outcome().has_value());
    EXPECT_FALSE(v.parsed());
}

TEST(JudgeClient, RetriesTransientFailures) {
    ScriptedTransport t({transient_failure(), transient_failure(), {true, "Evaluation Form: YES", false, 200, ""}});
    JudgeClient client(t, fast_options());
    const std::vector<QAItem> items{qa("a")};
    const auto v = client.judge_correctness(items);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].correct, true);
    EXPECT_EQ(v[0].attempts, 3);
    EXPECT_TRUE(v[0].error.empty());
}

TEST(JudgeClient, GivesUpAfterMaxAttempts) {
    ScriptedTransport t({transient_failure()});
    auto o = fast_options();
    o.max_attempts = 3;
    JudgeClient client(t, o);
    const std::vector<QAItem> items{qa("a")};
    const auto v = client.judge_correctness(items);
    EXPECT_FALSE(v[0].parsed());
    EXPECT_EQ(v[0].attempts, 3);
    EXPECT_EQ(v[0].error, "HTTP 503");
    EXPECT_EQ(t.calls(), 3u);
}

TEST(JudgeClient, PermanentErrorIsNotRetried) {
    ScriptedTransport t({{false, "bad request", false, 400, "HTTP 400"}});
    JudgeClient client(t, fast_options());
    const std::vector<QAItem> items{qa("a")};
    EXPECT_EQ(client.judge_correctness(items)[0].attempts, 1);
}

TEST(JudgeClient, UnparseableReplyIsRetried) {
    ScriptedTransport t(replies({"I am not sure.", "Evaluation Form (YES or NO): NO"}));
    JudgeClient client(t, fast_options());
    const std::vector<QAItem> items{qa("a")};
    const auto v = client.judge_correctness(items);
    EXPECT_EQ(v[0].correct, false);
    EXPECT_EQ(v[0].attempts, 2);
    EXPECT_EQ(v[0].raw_response, "Evaluation Form (YES or NO): NO");
}

TEST(JudgeClient, OrderIsPreservedUnderConcurrency) {
    auto r = ScriptedTransport::load_replies(fixture("judge/replies.jsonl"));
    ScriptedTransport t(r);
    auto o = fast_options();
    o.max_in_flight = 4;
    JudgeClient client(t, o);
    std::vector<QAItem> items;
    for (int i = 0; i < 12; ++i) items.push_back(qa("q" + std::to_string(i)));
    const auto v = client.judge_correctness(items);
    ASSERT_EQ(v.size(), 12u);
    for (int i = 0; i < 12; ++i) EXPECT_EQ(v[i].id, "q" + std::to_string(i));
    const auto s = summarize_correctness(v);
    EXPECT_EQ(s.judged, 12);
    EXPECT_EQ(s.correct, 8);
    EXPECT_EQ(s.unparseable, 0);
    EXPECT_DOUBLE_EQ(s.accuracy, 8.0 / 12.0);
}

TEST(JudgeClient, FirstNAndAuditLog) {
    TempDir dir;
    ScriptedTransport t(replies({"Evaluation Form: YES"}));
    auto o = fast_options();
    o.first_n = 3;
    o.audit_log = dir / "audit.jsonl";
    {
        JudgeClient client(t, o);
        std::vector<QAItem> items;
        for (int i = 0; i < 10; ++i) items.push_back(qa(std::to_string(i)));
        EXPECT_EQ(client.judge_correctness(items).size(), 3u);
    }
    std::ifstream in(dir / "audit.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("request"));
        EXPECT_EQ(j.at("response"), "Evaluation Form: YES");
        ++n;
    }
    EXPECT_EQ(n, 3);
}

TEST(JudgeClient, PairwiseSummary) {
    ScriptedTransport t(replies({"Score of the Assistant 1: 8\nScore of the Assistant 2: 6",
                                 "Score of the Assistant 1: 5\nScore of the Assistant 2: 5",
                                 "Score of the Assistant 1: 2\nScore of the Assistant 2: 9"}));
    auto o = fast_options();
    o.max_in_flight = 1;
    JudgeClient client(t, o);
    const std::vector<PairwiseItem> items{{"1", "q", "a", "b"}, {"2", "q", "a", "b"}, {"3", "q", "a", "b"}};
    const auto v = client.judge_pairwise(items);
    const auto s = summarize_pairwise(v);
    EXPECT_EQ(s.wins, 1);
    EXPECT_EQ(s.ties, 1);
    EXPECT_EQ(s.losses, 1);
    EXPECT_DOUBLE_EQ(s.win_rate, 1.0 / 3.0);
    EXPECT_EQ(to_json(v[0]).at("outcome"), "a_wins");
}

TEST(JudgeClient, OptionValidation) {
    ScriptedTransport t(replies({"YES"}));
    auto o = fast_options();
    o.max_attempts = 0;
    EXPECT_THROW(JudgeClient(t, o), ConfigError);
    EXPECT_THROW(ScriptedTransport(std::vector<TransportReply>{}), InputError);
}

TEST(HttpTransport, RejectsBadEndpoint) {
    EXPECT_THROW(HttpTransport(HttpTransportConfig{"ftp://x", "k"}), ConfigError);
    EXPECT_THROW(HttpTransport(HttpTransportConfig{"not a url", "k"}), ConfigError);
}

TEST(HttpTransport, TalksToLocalChatEndpoint) {
    httplib::Server server;
    std::atomic<int> calls{0};
    std::string seen_auth;
    nlohmann::json seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (calls++ == 0) {
            res.status = 429;
            return;
        }
        seen_auth = req.get_header_value("Authorization");
        seen_body = nlohmann::json::parse(req.body);
        const nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "Evaluation Form: NO"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpTransportConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.api_key = "secret";
    cfg.timeout = std::chrono::milliseconds(5000);
    HttpTransport http(cfg);
    JudgeClient client(http, fast_options());
    const auto v = client.judge_pairwise(PairwiseItem{"1", "q", "a", "b"});
    const std::vector<QAItem> items{qa("x")};
    const auto c = client.judge_correctness(items);
    server.stop();
    th.join();

    EXPECT_EQ(c[0].correct, false);
    EXPECT_EQ(c[0].attempts, 1);
    EXPECT_EQ(seen_auth, "Bearer secret");
    EXPECT_EQ(seen_body.at("model"), "gpt-3.5-turbo");
    EXPECT_EQ(seen_body.at("temperature"), 0.0);
    EXPECT_EQ(seen_body.at("messages").at(0).at("role"), "user");
    EXPECT_EQ(seen_body.at("messages").at(0).at("content"),
              render_correctness_prompt(context_and_question(qa("x")), "hyp"));
    // the first pairwise call hit 429 and was retried; its replies never parse as scores
    EXPECT_EQ(v.attempts, 4);
    EXPECT_FALSE(v.parsed());
}

TEST(HttpTransport, ConnectionFailureIsTransient) {
    HttpTransportConfig cfg;
    cfg.endpoint = "http://127.0.0.1:1/x";
    cfg.api_key = "k";
    cfg.timeout = std::chrono::milliseconds(500);
    const auto r = HttpTransport(cfg).complete("hi");
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(r.transient);
}
