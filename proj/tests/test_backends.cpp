// SPDX-License-Identifier: Apache-2.0
#include "smoothread/engine.hpp"
#include "smoothread/error.hpp"
#include "smoothread/niah.hpp"
#include "smoothread/protocol.hpp"
#include "smoothread/remote_backend.hpp"
#include "smoothread/sim_backend.hpp"

#include "stub_server.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace smoothread;
using namespace smoothread::backends;

namespace {

std::string words(std::size_t n, const char* stem = "w") {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += stem + std::to_string(i);
    }
    return s;
}

SimSession make(std::optional<std::size_t> window, TaskProgram program, SimCost cost = {}) {
    SimConfig cfg;
    cfg.window = window;
    cfg.program = program;
    cfg.cost = cost;
    return SimSession("t", cfg);
}

const std::string kUuid = "0b7c3a52-6e7d-4c45-9a1e-2f3b4c5d6e7f";

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("feed of n words is Int(1.5 n) tokens") {
    auto s = make(std::nullopt, TaskProgram::Echo);
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 10u}) {
        s.reset();
        s.feed(words(n), SourceTag::Context);
        CHECK(s.buffer().size() == n * 3 / 2);
        CHECK(s.call_log().back().tokens == n * 3 / 2);
    }
}

TEST_CASE("FIFO eviction keeps the newest W tokens") {
    auto whole = make(8, TaskProgram::Echo);
    whole.feed(words(10), SourceTag::Context);  // 15 tokens
    CHECK(whole.buffer().size() == 8);

    auto a = make(8, TaskProgram::Echo), b = make(8, TaskProgram::Echo);
    a.feed("a b c d", SourceTag::Context);
    a.feed("e f g h", SourceTag::Context);
    b.feed("a b c d", SourceTag::Context);
    b.feed("e f g h", SourceTag::Context);
    CHECK(a.buffer_text() == b.buffer_text());
    CHECK(a.clock_seconds() == b.clock_seconds());
    // 12 tokens pushed; a, both pieces of b, and c are gone.
    CHECK(a.buffer().size() == 8);
    CHECK(a.buffer_text() == "d\ne f g h");  // feed boundaries read back as newlines
}

TEST_CASE("constant cost clock is linear") {
    auto s = make(4096, TaskProgram::Echo, SimCost{0.001, 0.0, 12.0});
    s.feed(words(10), SourceTag::Context);  // 15 tokens
    CHECK(s.clock_seconds() == doctest::Approx(15 * 0.001).epsilon(1e-12));
    const double before = s.clock_seconds();
    const auto out = s.generate({GenerateMode::Answer, true, 0});
    const double gen_tokens = static_cast<double>(s.call_log().back().tokens);
    CHECK(s.clock_seconds() - before == doctest::Approx(gen_tokens * 12.0 * 0.001).epsilon(1e-12));
    CHECK(!out.empty());
}

TEST_CASE("unbounded attention clock matches the closed form") {
    const double p0 = 1e-4, p1 = 3e-8;
    for (std::size_t n : {2u, 100u, 1000u, 4000u}) {
        auto s = make(std::nullopt, TaskProgram::Echo, SimCost{p0, p1, 1.0});
        s.feed(words(n), SourceTag::Context);
        const double l = static_cast<double>(n * 3 / 2);
        CHECK(s.clock_seconds() == doctest::Approx(l * p0 + p1 * l * (l + 1) / 2).epsilon(1e-10));
    }
}

TEST_CASE("sliding window cost uses occupancy capped at W") {
    const double p0 = 1e-4, p1 = 1e-6;
    auto s = make(10, TaskProgram::Echo, SimCost{p0, p1, 1.0});
    s.feed(words(20), SourceTag::Context);  // 30 tokens
    double want = 0;
    for (int k = 1; k <= 30; ++k) want += p0 + p1 * std::min(k, 10);
    CHECK(s.clock_seconds() == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("clock is deterministic and non-decreasing") {
    auto run = [] {
        auto s = make(64, TaskProgram::NeedleRetrieval);
        s.feed(words(50), SourceTag::Context);
        s.feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
        s.generate({});
        s.reset();
        s.feed(words(5), SourceTag::Context);
        return s;
    };
    const auto a = run(), b = run();
    CHECK(a.clock_seconds() == b.clock_seconds());
    double prev = 0;
    for (const auto& rec : a.call_log()) {
        CHECK(rec.clock_after >= prev);
        prev = rec.clock_after;
    }
}

TEST_CASE("capacity law, exhaustive over small windows") {
    const std::string needle = niah::needle_sentence("apple", kUuid);
    const std::string query = "Question: What is the special magic word for apple?";
    const std::size_t needle_tokens = 8 * 3 / 2;
    const std::size_t query_tokens = 9 * 3 / 2;
    for (std::size_t w = 8; w <= 60; ++w) {
        for (std::size_t f = 0; f <= 40; ++f) {
            auto s = make(w, TaskProgram::NeedleRetrieval);
            s.feed(words(7, "pre"), SourceTag::Context);
            s.feed(needle, SourceTag::Context);
            s.feed(words(f), SourceTag::Context);
            s.feed(query, SourceTag::Scaffold);
            const auto out = s.generate({GenerateMode::Answer, true, 0});
            const std::size_t after = f * 3 / 2 + query_tokens;
            const bool query_seen = query_tokens <= w;
            const bool expect = query_seen && needle_tokens <= w && after + 1 <= w;
            INFO("W=" << w << " f=" << f);
            CHECK((out == kUuid) == expect);
        }
    }
}

TEST_CASE("needle program emits clues and stops when complete") {
    auto s = make(std::nullopt, TaskProgram::NeedleRetrieval);
    s.feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
    s.reset();
    const auto empty = protocol::parse(s.generate({}));
    CHECK(empty.clues.empty());
    CHECK(empty.decision == protocol::Decision::Continue);

    s.feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
    s.feed(words(30) + " " + niah::needle_sentence("apple", kUuid), SourceTag::Context);
    const auto sum = protocol::parse(s.generate({}));
    CHECK(sum.clues.find(kUuid) != std::string::npos);
    CHECK(sum.decision == protocol::Decision::Stop);
    CHECK(sum.final_answer == kUuid);

    const auto held = protocol::parse(s.generate({GenerateMode::Summary, false, 0}));
    CHECK(held.decision == protocol::Decision::Continue);
    CHECK(held.clues.find(kUuid) != std::string::npos);
}

TEST_CASE("evicted needle is absent from clues") {
    auto s = make(40, TaskProgram::NeedleRetrieval);
    s.feed(niah::needle_sentence("apple", kUuid), SourceTag::Context);
    s.feed(words(30), SourceTag::Context);
    s.feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
    const auto sum = protocol::parse(s.generate({}));
    CHECK(sum.clues.find(kUuid) == std::string::npos);
    CHECK(sum.decision == protocol::Decision::Continue);
}

TEST_CASE("summary tokens carry clues past eviction") {
    auto s = make(60, TaskProgram::NeedleRetrieval);
    s.feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
    s.feed(niah::needle_sentence("apple", kUuid), SourceTag::Context);
    s.generate({GenerateMode::Summary, false, 0});
    s.feed(words(20), SourceTag::Context);
    // The needle and query text are gone but the generated summary survives.
    CHECK(s.buffer_text().find("Question:") == std::string::npos);
    CHECK(s.generate({GenerateMode::Answer, true, 0}) == kUuid);
    bool has_summary_tag = false;
    for (const auto& t : s.buffer()) has_summary_tag |= t.tag == SourceTag::Summary;
    CHECK(has_summary_tag);
}

TEST_CASE("echo program returns the buffer tail") {
    auto s = make(std::nullopt, TaskProgram::Echo);
    s.feed("alpha beta gamma delta", SourceTag::Context);
    CHECK(s.generate({}) == "alpha beta gamma delta");
    auto t = make(std::nullopt, TaskProgram::Echo);
    t.feed("alpha beta gamma delta", SourceTag::Context);  // pieces 1, 2, 1, 2
    CHECK(t.generate({GenerateMode::Summary, true, 3}) == "gamma delta");
}

TEST_CASE("passage program counts distinct paragraphs") {
    auto s = make(std::nullopt, TaskProgram::PassageCount);
    s.feed("Paragraph 1: the sky is blue today\n\nParagraph 2: rivers run to the sea\n\n"
           "Paragraph 3: the sky is blue today",
           SourceTag::Context);
    CHECK(s.generate({GenerateMode::Answer, true, 0}) == "2");
}

TEST_CASE("attention answers do not depend on a declared window") {
    SimBackend a(std::nullopt), b(std::nullopt);
    for (auto* be : {&a, &b}) {
        auto s = be->open_session(Task::NeedleRetrieval);
        s->feed(niah::needle_sentence("apple", kUuid) + " " + words(5000), SourceTag::Context);
        s->feed("Question: What is the special magic word for apple?", SourceTag::Scaffold);
        CHECK(s->generate({GenerateMode::Answer, true, 0}) == kUuid);
        CHECK(s->kind() == "sim-attn");
    }
}

TEST_CASE("errors") {
    SimBackend be(128);
    CHECK(code_of([&] { be.open_session(Task::QuestionAnswering); }) == ErrorCode::UnsupportedTask);
    auto s = be.open_session(Task::NeedleRetrieval);
    s->close();
    CHECK(code_of([&] { s->feed("x", SourceTag::Context); }) == ErrorCode::SessionClosed);
    CHECK(code_of([] { SimBackend bad(std::size_t{0}); }) == ErrorCode::InvalidConfig);
}

// ---------------------------------------------------------------- remote

TEST_CASE("remote: stub summary round trip") {
    const protocol::ContextualSummary canned{"What is the special magic word for apple?", "apple=" + kUuid, "found",
                                             protocol::Decision::Stop, kUuid};
    testing::StubServer stub([&](const nlohmann::json&, int) {
        return testing::StubReply{200, testing::completion_body(protocol::render(canned))};
    });
    RemoteBackendConfig cfg;
    cfg.endpoint_url = stub.url();
    cfg.model_name = "stub-model";
    RemoteClient client(cfg);
    const auto text = client.generate({{"user", "hello"}});
    CHECK(protocol::parse(text) == canned);
    const auto log = client.call_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].attempts == 1);
    CHECK(log[0].prompt_tokens == 11);
    CHECK(log[0].completion_tokens == 7);
    const auto req = stub.requests().at(0);
    CHECK(req["model"] == "stub-model");
    CHECK(req["messages"][0]["role"] == "user");
    CHECK(req.contains("temperature"));
    CHECK(req.contains("max_tokens"));
}

TEST_CASE("remote: 500 twice then 200") {
    testing::StubServer stub([](const nlohmann::json&, int n) {
        if (n < 2) return testing::StubReply{500, "{}"};
        return testing::StubReply{200, testing::completion_body("ok")};
    });
    RemoteBackendConfig cfg;
    cfg.endpoint_url = stub.url();
    cfg.backoff_initial_seconds = 0.01;
    RemoteClient client(cfg);
    CHECK(client.generate({{"user", "x"}}) == "ok");
    REQUIRE(client.call_log().size() == 1);
    CHECK(client.call_log()[0].attempts == 3);
    CHECK(stub.requests().size() == 3);
}

TEST_CASE("remote: error classes") {
    testing::StubServer junk([](const nlohmann::json&, int) { return testing::StubReply{200, "<html>nope"}; });
    RemoteBackendConfig cfg;
    cfg.endpoint_url = junk.url();
    cfg.backoff_initial_seconds = 0.01;
    CHECK(code_of([&] { remote_generate(cfg, {{"user", "x"}}); }) == ErrorCode::RemoteProtocolError);

    testing::StubServer shape([](const nlohmann::json&, int) { return testing::StubReply{200, R"({"choices":[]})"}; });
    cfg.endpoint_url = shape.url();
    CHECK(code_of([&] { remote_generate(cfg, {{"user", "x"}}); }) == ErrorCode::RemoteProtocolError);

    testing::StubServer down([](const nlohmann::json&, int) { return testing::StubReply{503, "{}"}; });
    cfg.endpoint_url = down.url();
    cfg.max_retries = 2;
    CHECK(code_of([&] { remote_generate(cfg, {{"user", "x"}}); }) == ErrorCode::RemoteUnavailable);
    CHECK(down.requests().size() == 3);

    testing::StubServer denied([](const nlohmann::json&, int) { return testing::StubReply{401, "{}"}; });
    cfg.endpoint_url = denied.url();
    CHECK(code_of([&] { remote_generate(cfg, {{"user", "x"}}); }) == ErrorCode::RemoteUnavailable);
    CHECK(denied.requests().size() == 1);

    RemoteBackendConfig neg;
    neg.endpoint_url = "http://127.0.0.1:1/v1";
    neg.max_retries = -1;
    CHECK(code_of([&] { RemoteClient c(neg); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("remote: unsmooth reading over a stub model") {
    testing::StubServer stub([](const nlohmann::json& req, int) {
        // Stops as soon as the needle shows up in the user turn.
        const std::string user = req["messages"].back()["content"].get<std::string>();
        protocol::ContextualSummary s{"find apple", "", "reading", protocol::Decision::Continue, std::nullopt};
        if (user.find(kUuid) != std::string::npos) {
            s.clues = "apple=" + kUuid;
            s.decision = protocol::Decision::Stop;
            s.final_answer = kUuid;
        }
        return testing::StubReply{200, testing::completion_body(protocol::render(s))};
    });
    RemoteBackendConfig cfg;
    cfg.endpoint_url = stub.url();
    RemoteBackend be(cfg);
    auto session = be.open_session(Task::NeedleRetrieval);
    std::vector<chunker::Chunk> chunks;
    for (std::size_t i = 0; i < 4; ++i) {
        std::string t = words(20);
        if (i == 1) t += " " + niah::needle_sentence("apple", kUuid);
        chunks.push_back({i, t, chunker::estimate_tokens(t), {}});
    }
    const auto trace = engine::run_unsmooth(*session, chunks, "What is the special magic word for apple?");
    CHECK(trace.answer == kUuid);
    CHECK(trace.chunks_read == 2);
    CHECK(trace.backend == "remote");
    CHECK(stub.requests().size() == 2);
    // Every request carries the system prompt; reset leaves no earlier turns.
    for (const auto& r : stub.requests()) {
        CHECK(r["messages"][0]["role"] == "system");
        CHECK(r["messages"].size() == 2);
    }
}
