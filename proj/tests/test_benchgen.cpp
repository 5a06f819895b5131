// SPDX-License-Identifier: Apache-2.0
#include "smoothread/benchgen.hpp"
#include "smoothread/chunker.hpp"
#include "smoothread/engine.hpp"
#include "smoothread/error.hpp"
#include "smoothread/metrics.hpp"
#include "smoothread/sim_backend.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

using namespace smoothread;
using benchgen::NiahSpec;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ConfigError;
}

// Whitespace word count of an ASCII prefix.
std::size_t ascii_words(const std::string& s, std::size_t end) {
    std::size_t n = 0;
    bool in = false;
    for (std::size_t i = 0; i < end; ++i) {
        const bool sp = s[i] == ' ' || s[i] == '\n' || s[i] == '\t' || s[i] == '\r';
        if (sp) in = false;
        else if (!in) { in = true; ++n; }
    }
    return n;
}

const std::regex kNeedleRe(R"(The special magic word for ([a-z]+) is ([0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12})\.)");

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
}

}  // namespace

TEST_CASE("niah generation is deterministic under the seed") {
    NiahSpec spec;
    spec.context_tokens = 4096;
    spec.seed = 42;
    CHECK(to_json(benchgen::gen_niah(spec)).dump() == to_json(benchgen::gen_niah(spec)).dump());
    spec.seed = 43;
    NiahSpec other = spec;
    other.seed = 42;
    CHECK(to_json(benchgen::gen_niah(spec)).dump() != to_json(benchgen::gen_niah(other)).dump());
}

TEST_CASE("four needles, four distinct uuids, golds verbatim") {
    NiahSpec spec;
    spec.context_tokens = 16384;
    spec.num_needles = 4;
    spec.seed = 9;
    const auto item = benchgen::gen_niah(spec);
    std::set<std::string> keys, uuids;
    std::size_t matches = 0;
    for (std::sregex_iterator it(item.context.begin(), item.context.end(), kNeedleRe), end; it != end; ++it) {
        ++matches;
        keys.insert((*it)[1]);
        uuids.insert((*it)[2]);
    }
    CHECK(matches == 4);
    CHECK(keys.size() == 4);
    CHECK(uuids.size() == 4);
    REQUIRE(item.gold.size() == 4);
    for (const auto& g : item.gold) {
        CHECK(item.context.find(g) != std::string::npos);
        CHECK(uuids.count(g) == 1);
    }
    for (const auto& k : keys) CHECK(item.query.find(k) != std::string::npos);
    CHECK(item.task == Task::NeedleRetrieval);
}

TEST_CASE("context length within 5 percent") {
    for (std::size_t l : {1024u, 8192u, 32768u, 131072u}) {
        NiahSpec spec;
        spec.context_tokens = l;
        spec.seed = l;
        const auto item = benchgen::gen_niah(spec);
        const double est = static_cast<double>(chunker::estimate_tokens(item.context));
        CHECK(std::abs(est - static_cast<double>(l)) <= 0.05 * static_cast<double>(l));
    }
}

TEST_CASE("offset from end lands within the snap tolerance") {
    for (std::size_t offset : {2048u, 5120u}) {
        NiahSpec spec;
        spec.context_tokens = 32768;
        spec.placement = benchgen::Placement::OffsetFromEnd;
        spec.offsets_from_end = {offset};
        spec.seed = 1;
        const auto item = benchgen::gen_niah(spec);
        std::smatch m;
        REQUIRE(std::regex_search(item.context, m, kNeedleRe));
        const auto at = static_cast<std::size_t>(m.position(0));
        const std::size_t pos = ascii_words(item.context, at) * 3 / 2;
        const std::size_t total = chunker::estimate_tokens(item.context);
        const auto want = static_cast<long>(total) - static_cast<long>(offset);
        CHECK(std::labs(static_cast<long>(pos) - want) <= 16);
        CHECK(item.meta.at("needle_positions").at(0).get<std::size_t>() == pos);
        // Needle starts a sentence or at least a word.
        CHECK((at == 0 || item.context[at - 1] == ' ' || item.context[at - 1] == '\n'));
    }
}

TEST_CASE("generator and unbounded one-step agree") {
    NiahSpec spec;
    spec.context_tokens = 8192;
    spec.num_needles = 3;
    spec.seed = 17;
    const auto items = benchgen::gen_niah_suite(spec, 8);
    std::set<std::string> ids;
    for (const auto& item : items) {
        ids.insert(item.id);
        backends::SimBackend be(std::nullopt);
        auto s = be.open_session(item.task);
        const auto t = engine::run_one_step(*s, item.context, item.query);
        CHECK(metrics::score_item(item, t.answer).value == 1.0);
    }
    CHECK(ids.size() == items.size());
}

TEST_CASE("niah errors and custom haystacks") {
    NiahSpec spec;
    spec.context_tokens = 1000;
    spec.placement = benchgen::Placement::OffsetFromEnd;
    spec.offsets_from_end = {1000};
    CHECK(code_of([&] { benchgen::gen_niah(spec); }) == ErrorCode::InvalidOffset);
    spec.offsets_from_end = {10, 20};
    CHECK(code_of([&] { benchgen::gen_niah(spec); }) == ErrorCode::InvalidConfig);
    spec.placement = benchgen::Placement::UniformRandom;
    spec.offsets_from_end.clear();
    spec.num_needles = 0;
    CHECK(code_of([&] { benchgen::gen_niah(spec); }) == ErrorCode::InvalidConfig);

    spec.num_needles = 1;
    spec.haystack_path = temp_file("smoothread_hay.txt", "Short filler text. Another sentence here.\n").string();
    const auto item = benchgen::gen_niah(spec);
    CHECK(item.meta.at("haystack_cycled").get<bool>());
    CHECK(item.meta.at("warnings").size() == 1);
    spec.haystack_path = "/nonexistent/haystack.txt";
    CHECK(code_of([&] { benchgen::gen_niah(spec); }) == ErrorCode::IoError);
}

TEST_CASE("passage count gold is the number of unique passages") {
    benchgen::PassageCountSpec spec;
    spec.unique_passages = 5;
    spec.seed = 3;
    auto item = benchgen::gen_passage_count(spec);
    CHECK(item.gold == std::vector<std::string>{"5"});
    CHECK(item.task == Task::PassageCount);

    spec.unique_passages = 3;
    spec.copies = 2;
    item = benchgen::gen_passage_count(spec);
    CHECK(item.gold == std::vector<std::string>{"3"});
    std::size_t paragraphs = 0;
    for (std::size_t p = item.context.find("Paragraph "); p != std::string::npos; p = item.context.find("Paragraph ", p + 1))
        ++paragraphs;
    CHECK(paragraphs == 6);

    CHECK(to_json(benchgen::gen_passage_count(spec)).dump() == to_json(item).dump());

    backends::SimBackend be(std::nullopt);
    auto s = be.open_session(Task::PassageCount);
    const auto t = engine::run_one_step(*s, item.context, item.query);
    CHECK(t.answer == "3");

    spec.pool = {"only one passage here", "only one passage here"};
    spec.unique_passages = 2;
    CHECK(code_of([&] { benchgen::gen_passage_count(spec); }) == ErrorCode::InsufficientPool);
}

TEST_CASE("load_jsonl maps fields and reports bad lines") {
    const auto good = temp_file("smoothread_good.jsonl",
                                "{\"id\":\"a\",\"context\":\"c1\",\"query\":\"q1\",\"gold\":\"g1\"}\n"
                                "{\"id\":\"b\",\"context\":\"c2\",\"query\":\"q2\",\"gold\":[\"g2\",\"g3\"],\"task\":\"niah\"}\n"
                                "{\"id\":\"c\",\"context\":\"c3\",\"query\":\"q3\",\"gold\":\"g4\"}\n");
    auto r = benchgen::load_jsonl(good.string());
    REQUIRE(r.items.size() == 3);
    CHECK(r.errors.empty());
    CHECK(r.items[1].gold == std::vector<std::string>{"g2", "g3"});
    CHECK(r.items[1].task == Task::NeedleRetrieval);
    CHECK(r.items[0].task == Task::QuestionAnswering);

    const auto bad = temp_file("smoothread_bad.jsonl",
                               "{\"id\":\"a\",\"context\":\"c1\",\"query\":\"q1\",\"gold\":\"g1\"}\n"
                               "{not json\n"
                               "{\"id\":\"c\",\"context\":\"c3\",\"query\":\"q3\",\"gold\":\"g4\"}\n");
    r = benchgen::load_jsonl(bad.string());
    CHECK(r.items.size() == 2);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 2);

    const auto renamed = temp_file("smoothread_renamed.jsonl",
                                   "{\"_id\":\"x\",\"context\":\"ctx\",\"input\":\"what?\",\"answers\":[\"yes\"]}\n");
    r = benchgen::load_jsonl(renamed.string(), {{"query", "input"}, {"gold", "answers"}, {"id", "_id"}});
    REQUIRE(r.items.size() == 1);
    CHECK(r.items[0].query == "what?");
    CHECK(r.items[0].id == "x");
    CHECK(r.items[0].gold == std::vector<std::string>{"yes"});

    CHECK(code_of([] { benchgen::load_jsonl("/nonexistent/file.jsonl"); }) == ErrorCode::IoError);
}

TEST_CASE("write_jsonl round trip") {
    NiahSpec spec;
    spec.context_tokens = 2048;
    spec.num_needles = 2;
    const auto items = benchgen::gen_niah_suite(spec, 3);
    const auto path = std::filesystem::temp_directory_path() / "smoothread_roundtrip.jsonl";
    benchgen::write_jsonl(path.string(), items);
    const auto back = benchgen::load_jsonl(path.string());
    REQUIRE(back.items.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(to_json(back.items[i]).dump() == to_json(items[i]).dump());
}
