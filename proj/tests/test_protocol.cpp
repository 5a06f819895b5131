// SPDX-License-Identifier: Apache-2.0
#include "smoothread/error.hpp"
#include "smoothread/protocol.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <string>

using namespace smoothread;
using protocol::ContextualSummary;
using protocol::Decision;

namespace {

ErrorCode code_of(const std::string& text) {
    try {
        protocol::parse(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("parse did not throw");
    return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("render places the decision token last") {
    ContextualSummary s{"find key X", "", "", Decision::Continue, std::nullopt};
    const auto out = protocol::render(s);
    CHECK(out == "TARGET: find key X\nCLUES: \nREASON: \n<CONTINUE>");

    s.decision = Decision::Stop;
    s.final_answer = "42";
    const auto stop = protocol::render(s);
    CHECK(stop.size() >= 17);
    CHECK(stop.substr(stop.size() - 17) == "ANSWER: 42\n<STOP>");
}

TEST_CASE("round trip of a populated summary") {
    ContextualSummary s{"value of alpha", "alpha=1\nbeta=2", "chunk 3 held alpha", Decision::Stop, "1"};
    CHECK(protocol::parse(protocol::render(s)) == s);
}

TEST_CASE("noise around the block is ignored") {
    ContextualSummary s{"t", "c1\nc2", "r", Decision::Stop, "the answer"};
    const std::string noisy = "Sure, here you go.\n\n" + protocol::render(s) + "\nHope this helps! <b>";
    CHECK(protocol::parse(noisy) == s);
    std::string crlf;
    for (char ch : protocol::render(s)) {
        if (ch == '\n') crlf += '\r';
        crlf += ch;
    }
    CHECK(protocol::parse("  " + crlf + "  ") == s);
}

TEST_CASE("the last control token decides") {
    // The trailing CONTINUE wins and the ANSWER line is dropped.
    const auto s = protocol::parse("TARGET: t\nCLUES: c\nREASON: r\nANSWER: 7\n<STOP>\n<CONTINUE>");
    CHECK(s.decision == Decision::Continue);
    CHECK_FALSE(s.final_answer.has_value());
    CHECK(s.reason == "r");
    CHECK(code_of("TARGET: t\nCLUES: c\nREASON: r\n<CONTINUE>\nTARGET: t\nCLUES: c\nREASON: r\n<STOP>") ==
          ErrorCode::MissingAnswer);
}

TEST_CASE("malformed classes") {
    CHECK(code_of("TARGET: t\nCLUES: c\nREASON: r\n") == ErrorCode::NoDecision);
    CHECK(code_of("") == ErrorCode::NoDecision);
    CHECK(code_of("TARGET: t\nCLUES: c\nREASON: r\n<STOP>") == ErrorCode::MissingAnswer);
    CHECK(code_of("TARGT: t\nCLUES: c\nREASON: r\n<CONTINUE>") == ErrorCode::MalformedSummary);
    CHECK(code_of("TARGET: t\nCLUE: c\nREASON: r\n<CONTINUE>") == ErrorCode::MalformedSummary);
    CHECK(code_of("TARGET: t\nREASON: r\nCLUES: c\n<CONTINUE>") == ErrorCode::MalformedSummary);
}

TEST_CASE("render rejects invariant violations") {
    ContextualSummary s{"t", "c", "r", Decision::Stop, std::nullopt};
    CHECK_THROWS_AS(protocol::render(s), Error);
    s = {"t", "c", "r", Decision::Continue, "x"};
    CHECK_THROWS_AS(protocol::render(s), Error);
    s = {"t <STOP>", "c", "r", Decision::Continue, std::nullopt};
    CHECK_THROWS_AS(protocol::render(s), Error);
    s = {"t", "c\nREASON: fake", "r", Decision::Continue, std::nullopt};
    CHECK_THROWS_AS(protocol::render(s), Error);
    try {
        protocol::render(s);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSummary);
    }
}

TEST_CASE("randomized round trip and injectivity") {
    std::mt19937_64 rng(99);
    std::vector<std::pair<ContextualSummary, std::string>> seen;
    for (int i = 0; i < 500; ++i) {
        const auto s = oracles::random_summary(rng);
        const auto text = protocol::render(s);
        REQUIRE(protocol::parse(text) == s);
        seen.emplace_back(s, text);
    }
    for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
        if (!(seen[i].first == seen[i + 1].first)) CHECK(seen[i].second != seen[i + 1].second);
    }
}
