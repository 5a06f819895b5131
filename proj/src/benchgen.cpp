// SPDX-License-Identifier: Apache-2.0
#include "smoothread/benchgen.hpp"

#include "smoothread/assets.hpp"
#include "smoothread/chunker.hpp"
#include "smoothread/error.hpp"
#include "smoothread/niah.hpp"
#include "smoothread/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace smoothread::benchgen {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_sentence(std::string_view w) {
    return !w.empty() && (w.back() == '.' || w.back() == '!' || w.back() == '?');
}

struct HayWord {
    std::string lead;
    std::string text;
};

// Exactly `count` words, cycling through the corpus; cycles are joined by a
// blank line.
std::vector<HayWord> haystack_words(std::string_view corpus, std::size_t count, bool& cycled) {
    const auto words = text::split_words(corpus);
    if (words.empty()) throw Error(ErrorCode::InvalidConfig, "haystack corpus has no words");
    std::vector<HayWord> out;
    out.reserve(count);
    cycled = count > words.size();
    for (std::size_t i = 0; i < count; ++i) {
        const auto& w = words[i % words.size()];
        std::string lead(w.leading_space);
        if (i == 0) {
            lead.clear();
        } else if (i % words.size() == 0) {
            lead = "\n\n";
        }
        out.push_back({std::move(lead), std::string(w.text)});
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::string_view bundled_haystack() {
    static const std::string_view text = *assets::find("haystack/essays.txt");
    return text;
}

EvalItem gen_niah(const NiahSpec& spec) {
    const auto vocab = niah::key_vocabulary();
    if (spec.num_needles == 0 || spec.num_needles > vocab.size())
        throw Error(ErrorCode::InvalidConfig, "num_needles must be in [1, " + std::to_string(vocab.size()) + "]");
    if (spec.placement == Placement::OffsetFromEnd) {
        if (spec.offsets_from_end.size() != spec.num_needles)
            throw Error(ErrorCode::InvalidConfig, "need one offset per needle");
        for (auto o : spec.offsets_from_end) {
            if (o >= spec.context_tokens)
                throw Error(ErrorCode::InvalidOffset, "offset " + std::to_string(o) + " is not below context_tokens " +
                                                          std::to_string(spec.context_tokens));
        }
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<std::string_view> pool(vocab.begin(), vocab.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> keys(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.num_needles));
    std::vector<std::string> uuids;
    std::set<std::string> seen;
    while (uuids.size() < keys.size()) {
        auto u = niah::make_uuid(rng);
        if (seen.insert(u).second) uuids.push_back(std::move(u));
    }

    // Word budget so that Int(1.5 * words) lands on the requested length.
    const chunker::TokenRatio ratio{};
    const auto total_words = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.context_tokens) * ratio.den / static_cast<double>(ratio.num)));
    const std::size_t needle_words = niah::kNeedleWords * spec.num_needles;
    const std::size_t hay_count = total_words > needle_words ? total_words - needle_words : 1;

    std::string corpus_storage;
    std::string_view corpus;
    if (spec.haystack_path.empty()) {
        corpus = bundled_haystack();
    } else {
        corpus_storage = read_file(spec.haystack_path);
        corpus = corpus_storage;
    }
    bool cycled = false;
    const auto hay = haystack_words(corpus, hay_count, cycled);
    const std::size_t total_tokens = chunker::tokens_for_words(hay.size() + needle_words);

    // Desired first-token position of each needle.
    std::vector<std::size_t> desired(spec.num_needles);
    const std::size_t last_start = total_tokens > chunker::tokens_for_words(niah::kNeedleWords)
                                       ? total_tokens - chunker::tokens_for_words(niah::kNeedleWords)
                                       : 0;
    for (std::size_t k = 0; k < spec.num_needles; ++k) {
        if (spec.placement == Placement::OffsetFromEnd) {
            const std::size_t o = spec.offsets_from_end[k];
            desired[k] = total_tokens > o ? total_tokens - o : 0;
        } else {
            desired[k] = std::uniform_int_distribution<std::size_t>(0, last_start)(rng);
        }
    }

    // Needles go in ascending position; ties keep key order.
    std::vector<std::size_t> order(spec.num_needles);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return desired[a] < desired[b]; });

    // insert_at[k]: haystack word index the needle is placed before.
    std::vector<std::size_t> insert_at(spec.num_needles);
    std::vector<std::size_t> positions(spec.num_needles);
    std::size_t min_word = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t k = order[rank];
        const std::size_t before = rank * niah::kNeedleWords;
        auto pos_of = [&](std::size_t w) { return chunker::tokens_for_words(w + before); };
        auto dist = [&](std::size_t w) {
            const auto p = pos_of(w);
            return p > desired[k] ? p - desired[k] : desired[k] - p;
        };
        // Word index whose position is closest to the target.
        std::size_t lo = min_word, hi = hay.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (pos_of(mid) < desired[k]) lo = mid + 1; else hi = mid;
        }
        std::size_t best_word = std::min(lo, hay.size());
        if (best_word > min_word && (best_word == hay.size() || dist(best_word - 1) <= dist(best_word))) --best_word;

        std::optional<std::size_t> best_sentence;
        for (std::size_t w = best_word; w >= min_word; --w) {
            if (dist(w) > kSnapTokens && pos_of(w) < desired[k]) break;
            if (dist(w) <= kSnapTokens && (w == 0 || ends_sentence(hay[w - 1].text))) {
                best_sentence = w;
                break;
            }
            if (w == 0) break;
        }
        for (std::size_t w = best_word + 1; w <= hay.size(); ++w) {
            if (dist(w) > kSnapTokens) break;
            if (w == hay.size() || ends_sentence(hay[w - 1].text)) {
                if (!best_sentence || dist(w) < dist(*best_sentence)) best_sentence = w;
                break;
            }
        }
        insert_at[k] = best_sentence.value_or(best_word);
        positions[k] = pos_of(insert_at[k]);
        min_word = insert_at[k];
    }

    // Assemble.
    std::string context;
    context.reserve(hay.size() * 7 + needle_words * 8);
    std::size_t next_needle = 0;
    auto emit_needles_at = [&](std::size_t w, const std::string& lead_of_word) {
        bool any = false;
        while (next_needle < order.size() && insert_at[order[next_needle]] == w) {
            const std::size_t k = order[next_needle++];
            if (!context.empty()) context += any ? std::string(" ") : (lead_of_word.empty() ? " " : lead_of_word);
            context += niah::needle_sentence(keys[k], uuids[k]);
            any = true;
        }
        return any;
    };
    for (std::size_t w = 0; w <= hay.size(); ++w) {
        const std::string lead = w < hay.size() ? hay[w].lead : std::string();
        const bool needles = emit_needles_at(w, lead);
        if (w == hay.size()) break;
        if (!context.empty()) context += needles ? std::string(" ") : lead;
        context += hay[w].text;
    }

    EvalItem item;
    item.id = "niah-" + std::to_string(spec.seed);
    item.context = std::move(context);
    item.query = niah::query_for(keys);
    item.gold = uuids;
    item.task = Task::NeedleRetrieval;
    json spec_echo;
    spec_echo["context_tokens"] = spec.context_tokens;
    spec_echo["num_needles"] = spec.num_needles;
    spec_echo["placement"] = spec.placement == Placement::OffsetFromEnd ? "offset_from_end" : "uniform_random";
    spec_echo["offsets_from_end"] = spec.offsets_from_end;
    spec_echo["haystack"] = spec.haystack_path.empty() ? std::string("bundled") : spec.haystack_path;
    item.meta["needle_positions"] = positions;
    item.meta["keys"] = keys;
    item.meta["seed"] = spec.seed;
    item.meta["spec"] = spec_echo;
    item.meta["haystack_cycled"] = cycled;
    item.meta["warnings"] = json::array();
    if (cycled) item.meta["warnings"].push_back("haystack corpus shorter than the context; it was repeated");
    return item;
}

std::vector<EvalItem> gen_niah_suite(const NiahSpec& spec, std::size_t count) {
    std::vector<EvalItem> items;
    items.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        NiahSpec s = spec;
        s.seed = derive_seed(spec.seed, i);
        auto item = gen_niah(s);
        item.id = "niah-" + std::to_string(spec.seed) + "-" + std::to_string(i);
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<std::string> bundled_passage_pool() {
    std::vector<std::string> pool;
    std::string_view text = bundled_haystack();
    while (!text.empty()) {
        const auto cut = text.find("\n\n");
        std::string_view para = text.substr(0, cut);
        while (!para.empty() && (para.back() == '\n' || para.back() == ' ')) para.remove_suffix(1);
        if (text::count_words(para) >= 20) pool.emplace_back(para);
        if (cut == std::string_view::npos) break;
        text.remove_prefix(cut + 2);
    }
    return pool;
}

EvalItem gen_passage_count(const PassageCountSpec& spec) {
    if (spec.unique_passages == 0) throw Error(ErrorCode::InvalidConfig, "unique_passages must be positive");
    if (spec.copies == 0) throw Error(ErrorCode::InvalidConfig, "copies must be positive");
    std::vector<std::string> pool = spec.pool.empty() ? bundled_passage_pool() : spec.pool;
    {
        std::set<std::string> distinct;
        std::vector<std::string> unique;
        for (auto& p : pool) {
            if (p.find("\n\n") != std::string::npos)
                throw Error(ErrorCode::InvalidConfig, "passages must not contain blank lines");
            if (distinct.insert(p).second) unique.push_back(p);
        }
        pool = std::move(unique);
    }
    if (pool.size() < spec.unique_passages)
        throw Error(ErrorCode::InsufficientPool, "pool has " + std::to_string(pool.size()) + " distinct passages, " +
                                                     std::to_string(spec.unique_passages) + " requested");
    std::mt19937_64 rng(spec.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::size_t> sequence;
    for (std::size_t i = 0; i < spec.unique_passages; ++i) {
        for (std::size_t c = 0; c < spec.copies; ++c) sequence.push_back(i);
    }
    std::shuffle(sequence.begin(), sequence.end(), rng);

    std::string context;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        if (n > 0) context += "\n\n";
        context += "Paragraph " + std::to_string(n + 1) + ": " + pool[sequence[n]];
    }
    EvalItem item;
    item.id = "passage-count-" + std::to_string(spec.seed);
    item.context = std::move(context);
    item.query = std::string(kPassageCountQuery);
    item.gold = {std::to_string(spec.unique_passages)};
    item.task = Task::PassageCount;
    item.meta["seed"] = spec.seed;
    item.meta["spec"] = {{"unique_passages", spec.unique_passages}, {"copies", spec.copies}};
    item.meta["order"] = sequence;
    return item;
}

LoadResult load_jsonl(const std::string& path, const FieldMap& field_map, Task default_task) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    auto field = [&](const std::string& name) {
        auto it = field_map.find(name);
        return it == field_map.end() ? name : it->second;
    };
    LoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            if (!j.is_object()) throw std::runtime_error("line is not a JSON object");
            EvalItem item;
            item.id = j.contains(field("id")) ? j.at(field("id")).dump() : std::to_string(line_no);
            if (j.contains(field("id")) && j.at(field("id")).is_string()) item.id = j.at(field("id")).get<std::string>();
            item.context = j.at(field("context")).get<std::string>();
            item.query = j.at(field("query")).get<std::string>();
            const json& gold = j.at(field("gold"));
            if (gold.is_string()) {
                item.gold = {gold.get<std::string>()};
            } else {
                item.gold = gold.get<std::vector<std::string>>();
            }
            item.task = default_task;
            if (j.contains(field("task"))) {
                const auto name = j.at(field("task")).get<std::string>();
                const auto t = task_from_string(name);
                if (!t) throw std::runtime_error("unknown task '" + name + "'");
                item.task = *t;
            }
            if (j.contains("meta")) item.meta = j.at("meta");
            result.items.push_back(std::move(item));
        } catch (const std::exception& e) {
            result.errors.push_back({line_no, e.what()});
        }
    }
    if (in.bad()) throw Error(ErrorCode::IoError, "read error in " + path);
    return result;
}

void write_jsonl(const std::string& path, const std::vector<EvalItem>& items) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (const auto& item : items) out << to_json(item).dump() << '\n';
    if (!out) throw Error(ErrorCode::IoError, "write error in " + path);
}

}  // namespace smoothread::benchgen
