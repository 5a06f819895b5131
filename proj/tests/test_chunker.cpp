// SPDX-License-Identifier: Apache-2.0
#include "smoothread/chunker.hpp"
#include "smoothread/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

using namespace smoothread;
using chunker::ChunkingConfig;
using oracles::random_text;
using oracles::ref_chunks;

TEST_CASE("estimate_tokens truncates 1.5 x words") {
    CHECK(chunker::estimate_tokens("") == 0);
    CHECK(chunker::estimate_tokens("hello world") == 3);
    CHECK(chunker::estimate_tokens("one two three four five six seven eight nine ten.") == 15);
    CHECK(chunker::estimate_tokens("  lone  ") == 1);
    CHECK(chunker::estimate_tokens("a　b c") == 4);
    CHECK(chunker::estimate_tokens("a b c d", {1, 1}) == 4);
}

TEST_CASE("default delimiter list") {
    const std::vector<std::string> want = {"\n\n\n", "\n\n", "\n", ". ", ".", "! ", "? ", ", ", "; ", ": ", " -- ", " "};
    CHECK(chunker::default_delimiters() == want);
}

TEST_CASE("short text is a single chunk") {
    ChunkingConfig cfg;
    cfg.max_chunk_tokens = 100;
    const std::string t = "Small text.\n\nWith two paragraphs.";
    const auto chunks = chunker::split_hierarchical(t, cfg);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == t);
    CHECK(chunks[0].byte_span == chunker::ByteSpan{0, t.size()});
}

TEST_CASE("paragraph merge attaches delimiters to the predecessor") {
    // 6-word paragraphs estimate 9 tokens; two of them 18, three 27.
    const std::string p1 = "one two three four five six", p2 = "seven eight nine ten eleven twelve",
                      p3 = "a b c d e f";
    const std::string t = p1 + "\n\n" + p2 + "\n\n" + p3;
    ChunkingConfig cfg;
    cfg.max_chunk_tokens = 20;
    const auto chunks = chunker::split_hierarchical(t, cfg);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == p1 + "\n\n" + p2 + "\n\n");
    CHECK(chunks[1].text == p3);
    CHECK(chunks[0].est_tokens == 18);
    CHECK(ref_chunks(t, cfg) == std::vector<std::string>{chunks[0].text, chunks[1].text});
}

TEST_CASE("seven-word paragraphs estimate 10 tokens but do not pair up under 20") {
    const std::string p = "w1 w2 w3 w4 w5 w6 w7";
    REQUIRE(chunker::estimate_tokens(p) == 10);
    ChunkingConfig cfg;
    cfg.max_chunk_tokens = 20;
    const auto chunks = chunker::split_hierarchical(p + "\n\n" + p + "\n\n" + p, cfg);
    CHECK(chunks.size() == 3);
}

TEST_CASE("sentence-level splits inside one paragraph") {
    std::string t;
    for (int i = 0; i < 10; ++i) t += "s" + std::to_string(i) + " x y. ";
    t.pop_back();
    ChunkingConfig cfg;
    cfg.max_chunk_tokens = 10;
    const auto chunks = chunker::split_hierarchical(t, cfg);
    REQUIRE(chunks.size() == 5);
    for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
        CHECK(chunks[i].text.size() >= 2);
        CHECK(chunks[i].text.substr(chunks[i].text.size() - 2) == ". ");
        CHECK(chunks[i].est_tokens == 9);
    }
    std::vector<std::string> texts;
    for (const auto& c : chunks) texts.push_back(c.text);
    CHECK(texts == ref_chunks(t, cfg));
}

TEST_CASE("delimiter-free runs are emitted oversized") {
    ChunkingConfig cfg;
    cfg.max_chunk_tokens = 2;
    cfg.delimiters = {"\n"};
    const auto chunks = chunker::split_hierarchical("aa bb cc dd\nee", cfg);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == "aa bb cc dd\n");
    CHECK(chunks[0].est_tokens == 6);
    CHECK(chunks[1].text == "ee");
}

TEST_CASE("errors") {
    ChunkingConfig cfg;
    CHECK_THROWS_AS(chunker::split_hierarchical("", cfg), Error);
    try {
        chunker::split_hierarchical("", cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
    cfg.max_chunk_tokens = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.max_chunk_tokens = 10;
    cfg.delimiters = {};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.delimiters = {"\n", ""};
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("randomized texts match the reference splitter") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> max_pick(1, 120);
    for (int iter = 0; iter < 300; ++iter) {
        const std::string t = random_text(rng);
        ChunkingConfig cfg;
        cfg.max_chunk_tokens = max_pick(rng);
        const auto chunks = chunker::split_hierarchical(t, cfg);
        std::vector<std::string> texts;
        for (const auto& c : chunks) {
            texts.push_back(c.text);
            CHECK(c.est_tokens == oracles::tokens(c.text));
        }
        REQUIRE(texts == ref_chunks(t, cfg));
    }
}

TEST_CASE("est_tokens always equals estimate_tokens of the chunk") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 100; ++iter) {
        const std::string t = random_text(rng);
        ChunkingConfig cfg;
        cfg.max_chunk_tokens = 1 + iter % 40;
        for (const auto& c : chunker::split_hierarchical(t, cfg)) CHECK(c.est_tokens == chunker::estimate_tokens(c.text));
    }
}
