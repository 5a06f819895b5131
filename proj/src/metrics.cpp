// SPDX-License-Identifier: Apache-2.0
#include "smoothread/metrics.hpp"

#include "smoothread/error.hpp"
#include "smoothread/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace smoothread::metrics {

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::ExactMatch: return "exact_match";
        case Metric::TokenF1: return "f1";
        case Metric::RougeL: return "rouge_l";
        case Metric::EditSim: return "edit_sim";
    }
    return "unknown";
}

namespace {

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

}  // namespace

std::vector<std::string> normalized_tokens(std::string_view s, const Normalization& norm) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (char c : s) {
        if (norm.strip_punctuation && is_ascii_punct(c)) continue;
        if (norm.lowercase && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        cleaned.push_back(c);
    }
    std::vector<std::string> out;
    for (const auto& w : text::split_words(cleaned)) {
        if (norm.drop_articles && is_article(w.text)) continue;
        out.emplace_back(w.text);
    }
    return out;
}

std::string normalize_answer(std::string_view s, const Normalization& norm) {
    const auto toks = normalized_tokens(s, norm);
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += toks[i];
    }
    return out;
}

double exact_match(std::string_view pred, std::string_view gold, const Normalization& norm) {
    return normalize_answer(pred, norm) == normalize_answer(gold, norm) ? 1.0 : 0.0;
}

double token_f1(std::string_view pred, std::string_view gold, const Normalization& norm) {
    const auto p = normalized_tokens(pred, norm);
    const auto g = normalized_tokens(gold, norm);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;
    std::map<std::string_view, std::size_t> counts;
    for (const auto& t : g) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : p) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    // 2PR / (P + R) with P = overlap / |p| and R = overlap / |g|, in the
    // form that rounds once.
    return 2.0 * static_cast<double>(overlap) / static_cast<double>(p.size() + g.size());
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[b.size()];
}

double rouge_l(std::string_view pred, std::string_view gold, const Normalization& norm) {
    const auto p = normalized_tokens(pred, norm);
    const auto g = normalized_tokens(gold, norm);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;
    const auto lcs = static_cast<double>(lcs_length(p, g));
    return 2.0 * lcs / static_cast<double>(p.size() + g.size());
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({sub, up + 1, row[j - 1] + 1});
            diag = up;
        }
    }
    return row[b.size()];
}

double edit_similarity(std::string_view pred, std::string_view gold) {
    const auto a = text::to_code_points(pred);
    const auto b = text::to_code_points(gold);
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

Metric metric_for(Task task) {
    switch (task) {
        case Task::NeedleRetrieval:
        case Task::PassageCount:
        case Task::PassageRetrieval:
        case Task::FewShotClassification: return Metric::ExactMatch;
        case Task::QuestionAnswering:
        case Task::FewShotQA: return Metric::TokenF1;
        case Task::Summarization:
        case Task::FewShotSummarization: return Metric::RougeL;
        case Task::CodeCompletion: return Metric::EditSim;
    }
    return Metric::ExactMatch;
}

double compute(Metric metric, std::string_view pred, std::string_view gold) {
    switch (metric) {
        case Metric::ExactMatch: return exact_match(pred, gold);
        case Metric::TokenF1: return token_f1(pred, gold);
        case Metric::RougeL: return rouge_l(pred, gold);
        case Metric::EditSim: return edit_similarity(pred, gold);
    }
    return 0.0;
}

MetricResult score_item(const EvalItem& item, std::string_view answer) {
    MetricResult r;
    r.name = metric_for(item.task);
    if (item.gold.empty()) return r;
    if (item.task == Task::NeedleRetrieval) {
        std::string spaced(answer);
        std::replace_if(spaced.begin(), spaced.end(), [](char c) { return c == ',' || c == ';'; }, ' ');
        std::vector<std::string> pieces;
        for (const auto& w : text::split_words(spaced)) pieces.push_back(normalize_answer(w.text));
        std::size_t found = 0;
        for (const auto& g : item.gold) {
            const auto ng = normalize_answer(g);
            if (std::find(pieces.begin(), pieces.end(), ng) != pieces.end()) ++found;
        }
        r.value = static_cast<double>(found) / static_cast<double>(item.gold.size());
        return r;
    }
    for (const auto& g : item.gold) r.value = std::max(r.value, compute(r.name, answer, g));
    return r;
}

double score_suite(const std::vector<double>& item_scores) {
    if (item_scores.empty()) throw Error(ErrorCode::EmptySuite, "no item scores to aggregate");
    const double mean = std::accumulate(item_scores.begin(), item_scores.end(), 0.0) /
                        static_cast<double>(item_scores.size());
    return std::round(mean * 100.0 * 100.0) / 100.0;
}

}  // namespace smoothread::metrics
