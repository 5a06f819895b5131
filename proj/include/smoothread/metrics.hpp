// SPDX-License-Identifier: Apache-2.0
//
// Answer-quality metrics: exact match, token F1, Rouge-L (F1 of the LCS) and
// edit similarity, plus per-task scoring of evaluation items.
//
// Normalization lowercases ASCII letters, replaces ASCII punctuation with
// nothing, optionally drops the articles a/an/the, and splits on Unicode
// whitespace. Exact match drops articles by default; F1 and Rouge-L keep them
// by default (so "a b c" vs "a b d" scores 2/3), all three are configurable.
#pragma once

#include "smoothread/eval_item.hpp"
#include "smoothread/task.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace smoothread::metrics {

enum class Metric { ExactMatch, TokenF1, RougeL, EditSim };

std::string_view to_string(Metric m);

struct MetricResult {
    Metric name = Metric::ExactMatch;
    double value = 0.0;
};

struct Normalization {
    bool lowercase = true;
    bool strip_punctuation = true;
    bool drop_articles = true;
};

inline constexpr Normalization kExactMatchNormalization{true, true, true};
inline constexpr Normalization kOverlapNormalization{true, true, false};

std::vector<std::string> normalized_tokens(std::string_view s, const Normalization& norm);
std::string normalize_answer(std::string_view s, const Normalization& norm = kExactMatchNormalization);

double exact_match(std::string_view pred, std::string_view gold, const Normalization& norm = kExactMatchNormalization);
double token_f1(std::string_view pred, std::string_view gold, const Normalization& norm = kOverlapNormalization);
double rouge_l(std::string_view pred, std::string_view gold, const Normalization& norm = kOverlapNormalization);
// Over Unicode code points, no normalization.
double edit_similarity(std::string_view pred, std::string_view gold);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

Metric metric_for(Task task);
double compute(Metric metric, std::string_view pred, std::string_view gold);

// NIAH items score the fraction of gold values found among the answer's
// comma/whitespace-separated pieces; other tasks take the best score of their
// metric over the gold list.
MetricResult score_item(const EvalItem& item, std::string_view answer);

// Arithmetic mean of item scores times 100, rounded to two decimals. Throws
// EmptySuite on an empty list.
double score_suite(const std::vector<double>& item_scores);

}  // namespace smoothread::metrics
