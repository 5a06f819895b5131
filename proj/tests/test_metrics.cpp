// SPDX-License-Identifier: Apache-2.0
#include "smoothread/error.hpp"
#include "smoothread/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace smoothread;
using namespace smoothread::metrics;
using namespace smoothread::oracles;

TEST_CASE("exact match") {
    CHECK(exact_match("The Answer", "answer") == 1.0);
    CHECK(exact_match("42", "43") == 0.0);
    CHECK(exact_match("", "") == 1.0);
    CHECK(exact_match("  Paris!! ", "paris") == 1.0);
}

TEST_CASE("token f1") {
    CHECK(token_f1("a b c", "a b d") == 2.0 / 3.0);
    CHECK(token_f1("same words here", "same words here") == 1.0);
    CHECK(token_f1("x y", "p q") == 0.0);
    CHECK(token_f1("", "x") == 0.0);
    CHECK(token_f1("x", "") == 0.0);
    CHECK(token_f1("", "") == 1.0);
    // Multiset overlap: the second "x" only counts once.
    CHECK(token_f1("x x", "x y") == f_measure(1, 2, 2));
}

TEST_CASE("rouge-l") {
    CHECK(rouge_l("a b c", "a b c") == 1.0);
    CHECK(rouge_l("the cat", "the cat sat") == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(rouge_l("the cat", "the cat sat") == f_measure(2, 2, 3));
    CHECK(rouge_l("x y", "p q") == 0.0);
}

TEST_CASE("edit similarity") {
    CHECK(edit_similarity("kitten", "sitting") == 1.0 - 3.0 / 7.0);
    CHECK(edit_similarity("abc", "abc") == 1.0);
    CHECK(edit_similarity("", "abc") == 0.0);
    CHECK(edit_similarity("", "") == 1.0);
    CHECK(edit_similarity("中文", "中") == 0.5);
}

TEST_CASE("rouge-l and f1 equal the brute-force oracles on random pairs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        auto a = random_tokens(rng, 14);
        auto b = random_tokens(rng, 20);
        if (i % 2) std::swap(a, b);
        const auto& shorter = a.size() <= b.size() ? a : b;
        const auto& longer = a.size() <= b.size() ? b : a;
        const std::size_t lcs = brute_lcs(shorter, longer);
        CHECK(lcs_length(a, b) == lcs);
        CHECK(rouge_l(join(a), join(b)) == f_measure(lcs, a.size(), b.size()));
        CHECK(rouge_l(join(a), join(a)) == 1.0);
        CHECK(token_f1(join(a), join(a)) == 1.0);
        const double f = token_f1(join(a), join(b));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("edit similarity equals the DP oracle on random pairs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_chars(rng), b = random_chars(rng);
        const std::size_t d = dp_distance(a, b);
        CHECK(levenshtein(a, b) == d);
        const std::size_t longest = std::max(a.size(), b.size());
        const double want = longest == 0 ? 1.0 : 1.0 - static_cast<double>(d) / static_cast<double>(longest);
        CHECK(edit_similarity(utf8(a), utf8(b)) == want);
    }
}

TEST_CASE("edit distance triangle inequality") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_chars(rng), b = random_chars(rng), c = random_chars(rng);
        CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    }
}

TEST_CASE("article handling is configurable") {
    CHECK(normalize_answer("The  Quick, brown fox.") == "quick brown fox");
    CHECK(normalize_answer("The fox", kOverlapNormalization) == "the fox");
    CHECK(token_f1("the fox", "fox", kExactMatchNormalization) == 1.0);
    CHECK(token_f1("the fox", "fox") == f_measure(1, 2, 1));
}

TEST_CASE("task to metric mapping") {
    CHECK(metric_for(Task::NeedleRetrieval) == Metric::ExactMatch);
    CHECK(metric_for(Task::PassageCount) == Metric::ExactMatch);
    CHECK(metric_for(Task::QuestionAnswering) == Metric::TokenF1);
    CHECK(metric_for(Task::Summarization) == Metric::RougeL);
    CHECK(metric_for(Task::CodeCompletion) == Metric::EditSim);
}

TEST_CASE("item and suite scoring") {
    EvalItem niah;
    niah.task = Task::NeedleRetrieval;
    niah.gold = {"u1-aa", "u2-bb", "u3-cc", "u4-dd"};
    CHECK(score_item(niah, "u1-aa, u3-cc, u4-dd").value == 0.75);
    CHECK(score_item(niah, "u4-dd u3-cc u2-bb u1-aa").value == 1.0);
    CHECK(score_item(niah, "unknown").value == 0.0);

    EvalItem qa;
    qa.task = Task::QuestionAnswering;
    qa.gold = {"red apple", "green pear"};
    const auto r = score_item(qa, "green pear");
    CHECK(r.name == Metric::TokenF1);
    CHECK(r.value == 1.0);

    CHECK(score_suite({1.0, 0.0}) == 50.00);
    CHECK(score_suite({1.0, 1.0, 0.0}) == 66.67);
    CHECK_THROWS_AS(score_suite({}), Error);
    try {
        score_suite({});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySuite);
    }
}
