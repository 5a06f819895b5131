// SPDX-License-Identifier: Apache-2.0
#include "smoothread/sim_backend.hpp"

#include "smoothread/error.hpp"
#include "smoothread/niah.hpp"
#include "smoothread/text.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace smoothread::backends {

namespace {

constexpr std::size_t kMaxSummaryScanTokens = 1 << 15;
constexpr std::size_t kMaxQueryScanWords = 64;

bool has_newline(std::string_view s) { return s.find('\n') != std::string_view::npos; }

bool is_paragraph_number(std::string_view w) {
    if (w.size() < 2 || w.back() != ':') return false;
    return std::all_of(w.begin(), w.end() - 1, [](char c) { return c >= '0' && c <= '9'; });
}

std::string fingerprint(const std::vector<std::string_view>& words) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) h = (h ^ static_cast<unsigned char>(' ')) * 1099511628211ULL;
        for (char c : words[i]) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    }
    const auto folded = static_cast<std::uint32_t>(h ^ (h >> 32));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", folded);
    return buf;
}

template <class T>
const T* fact_as(const std::shared_ptr<const Fact>& f) {
    return std::get_if<T>(f.get());
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace

TaskProgram program_for(Task task) {
    switch (task) {
        case Task::NeedleRetrieval: return TaskProgram::NeedleRetrieval;
        case Task::PassageCount: return TaskProgram::PassageCount;
        default:
            throw Error(ErrorCode::UnsupportedTask,
                        "the simulator has no task program for '" + std::string(to_string(task)) + "'");
    }
}

SimSession::SimSession(std::string id, SimConfig config) : Session(std::move(id)), config_(config) {
    if (config_.window && *config_.window == 0) throw Error(ErrorCode::InvalidConfig, "window must be positive");
}

std::string_view SimSession::kind() const noexcept { return config_.window ? "sim-swa" : "sim-attn"; }

void SimSession::feed(std::string_view text, SourceTag tag) {
    ensure_open();
    const std::size_t tokens = push_text(text, tag, 1.0);
    log(CallKind::Feed, tokens);
}

void SimSession::reset() {
    ensure_open();
    buffer_.clear();
    passage_open_ = false;
    log(CallKind::Reset, 0);
}

std::string SimSession::generate(const GenerateRequest& request) {
    ensure_open();
    if (passage_open_) finalize_passage();
    std::string out;
    switch (config_.program) {
        case TaskProgram::NeedleRetrieval: out = run_needle_program(request); break;
        case TaskProgram::PassageCount: out = run_passage_program(request); break;
        case TaskProgram::Echo: out = run_echo_program(request); break;
    }
    const std::size_t tokens = push_text(out, SourceTag::Summary, config_.cost.d_mult);
    log(CallKind::Generate, tokens);
    return out;
}

std::size_t SimSession::push_text(std::string_view text, SourceTag tag, double cost_multiplier) {
    const auto words = text::split_words(text);
    std::size_t pushed = 0;
    for (std::size_t k = 0; k < words.size(); ++k) {
        const auto& w = words[k];
        const std::size_t pieces = chunker::tokens_for_words(k + 1, config_.token_ratio) -
                                   chunker::tokens_for_words(k, config_.token_ratio);
        if (pieces == 0) continue;

        if (config_.program == TaskProgram::PassageCount && passage_open_ &&
            (tag != SourceTag::Context || w.leading_space.find("\n\n") != std::string_view::npos)) {
            finalize_passage();
        }

        for (std::size_t p = 0; p < pieces; ++p) {
            SimToken t;
            t.tag = tag;
            t.first_piece = p == 0;
            if (p == 0) {
                t.word = std::string(w.text);
                t.lead = std::string(w.leading_space);
                t.feed_start = k == 0;
            }
            push_token(std::move(t), cost_multiplier);
        }
        pushed += pieces;
        if (tag == SourceTag::Context) passage_open_ = true;
        recognize(tag);
    }
    return pushed;
}

void SimSession::push_token(SimToken token, double cost_multiplier) {
    buffer_.push_back(std::move(token));
    if (config_.window && buffer_.size() > *config_.window) buffer_.pop_front();
    const auto occupancy = static_cast<double>(buffer_.size());
    advance_clock(cost_multiplier * (config_.cost.p0 + config_.cost.p1 * occupancy));
}

void SimSession::recognize(SourceTag) {
    if (buffer_.empty()) return;
    // Index of the first piece of the word that was just completed.
    std::size_t last = buffer_.size() - 1;
    while (last > 0 && !buffer_[last].first_piece) --last;
    if (!buffer_[last].first_piece) return;
    const std::string& word = buffer_[last].word;

    auto word_starts = [&](std::size_t from, std::size_t max_words) {
        std::vector<std::size_t> idx;
        for (std::size_t i = from + 1; i-- > 0 && idx.size() < max_words;) {
            if (buffer_[i].first_piece) idx.push_back(i);
        }
        std::reverse(idx.begin(), idx.end());
        return idx;
    };
    auto text_between = [&](std::size_t begin, std::size_t end_inclusive) {
        std::string s;
        bool first = true;
        for (std::size_t i = begin; i <= end_inclusive; ++i) {
            const auto& t = buffer_[i];
            if (!t.first_piece) continue;
            if (!first) s += (t.lead.empty() && t.feed_start) ? std::string("\n") : t.lead;
            s += t.word;
            first = false;
        }
        return s;
    };

    if (word.size() == 37 && word.back() == '.') {
        const auto idx = word_starts(last, niah::kNeedleWords);
        if (idx.size() == niah::kNeedleWords) {
            std::vector<std::string_view> words;
            for (auto i : idx) words.push_back(buffer_[i].word);
            NeedleFact f;
            if (niah::match_needle_tail(words, f.key, f.value))
                buffer_.back().fact = std::make_shared<const Fact>(std::move(f));
        }
        return;
    }

    if (word == protocol::kContinueToken || word == protocol::kStopToken) {
        const std::size_t floor = buffer_.size() > kMaxSummaryScanTokens ? buffer_.size() - kMaxSummaryScanTokens : 0;
        for (std::size_t i = last; i-- > floor;) {
            const auto& t = buffer_[i];
            if (!t.first_piece || t.word != protocol::kTargetHeader) continue;
            if (!(t.feed_start || has_newline(t.lead) || i == 0)) continue;
            try {
                auto summary = protocol::parse(text_between(i, buffer_.size() - 1));
                buffer_.back().fact = std::make_shared<const Fact>(SummaryFact{std::move(summary)});
            } catch (const Error&) {
            }
            break;
        }
        return;
    }

    if (!word.empty() && word.back() == '?') {
        const auto idx = word_starts(last, kMaxQueryScanWords);
        for (std::size_t j = idx.size(); j-- > 0;) {
            const auto& t = buffer_[idx[j]];
            if (t.word == "Question:") {
                if (j + 1 < idx.size()) {
                    buffer_.back().fact =
                        std::make_shared<const Fact>(QueryFact{text_between(idx[j + 1], buffer_.size() - 1)});
                }
                break;
            }
            if (j + 1 < idx.size() && (t.feed_start || has_newline(t.lead))) break;
        }
    }
}

// A passage is "Paragraph N: ..." up to the next blank line. Called before the
// word that follows the passage is pushed, so the passage's last word is at the
// back of the buffer.
void SimSession::finalize_passage() {
    passage_open_ = false;
    if (buffer_.empty() || buffer_.back().tag != SourceTag::Context) return;
    std::vector<std::string_view> words;
    for (std::size_t i = buffer_.size(); i-- > 0;) {
        const auto& t = buffer_[i];
        if (t.tag != SourceTag::Context) return;
        if (!t.first_piece) continue;
        words.push_back(t.word);
        const bool starts_paragraph = t.feed_start || t.lead.find("\n\n") != std::string::npos || i == 0;
        if (is_paragraph_number(t.word)) {
            // Needs the "Paragraph" word right before the number.
            std::size_t j = i;
            do {
                if (j == 0) return;
                --j;
            } while (!buffer_[j].first_piece);
            if (buffer_[j].word != "Paragraph") return;
            words.pop_back();
            std::reverse(words.begin(), words.end());
            if (words.empty()) return;
            buffer_.back().fact = std::make_shared<const Fact>(PassageFact{fingerprint(words)});
            return;
        }
        if (starts_paragraph) return;
    }
}

std::vector<std::shared_ptr<const Fact>> SimSession::visible_facts() const {
    std::vector<std::shared_ptr<const Fact>> out;
    for (const auto& t : buffer_) {
        if (t.fact) out.push_back(t.fact);
    }
    return out;
}

std::string SimSession::buffer_text() const {
    std::string s;
    bool first = true;
    for (const auto& t : buffer_) {
        if (!t.first_piece) continue;
        if (!first) s += (t.lead.empty() && t.feed_start) ? std::string("\n") : t.lead;
        s += t.word;
        first = false;
    }
    return s;
}

std::string SimSession::run_needle_program(const GenerateRequest& request) {
    const auto facts = visible_facts();

    std::string target;
    std::vector<std::string> keys;
    auto add_keys = [&](const std::vector<std::string>& ks) {
        for (const auto& k : ks) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
    };
    for (const auto& f : facts) {
        if (const auto* q = fact_as<QueryFact>(f)) {
            auto ks = niah::keys_in_query(q->text);
            if (!ks.empty()) {
                target = q->text;
                add_keys(ks);
            }
        } else if (const auto* s = fact_as<SummaryFact>(f)) {
            auto ks = niah::keys_in_query(s->summary.target);
            if (!ks.empty()) {
                target = s->summary.target;
                add_keys(ks);
            }
        }
    }

    std::map<std::string, std::string> remembered;
    std::map<std::string, std::string> fresh;
    for (const auto& f : facts) {
        if (const auto* s = fact_as<SummaryFact>(f)) {
            for (auto& [k, v] : niah::parse_clues(s->summary.clues)) remembered[k] = v;
        } else if (const auto* n = fact_as<NeedleFact>(f)) {
            fresh[n->key] = n->value;
        }
    }

    std::vector<std::string> clue_items;
    std::vector<std::string> values;
    std::vector<std::string> new_keys;
    for (const auto& k : keys) {
        std::string value;
        if (auto it = remembered.find(k); it != remembered.end()) {
            value = it->second;
        } else if (auto jt = fresh.find(k); jt != fresh.end()) {
            value = jt->second;
            new_keys.push_back(k);
        } else {
            continue;
        }
        clue_items.push_back(niah::format_clue(k, value));
        values.push_back(value);
    }
    const bool complete = !keys.empty() && values.size() == keys.size();

    if (request.mode == GenerateMode::Answer) return values.empty() ? std::string("unknown") : join(values, ", ");

    protocol::ContextualSummary summary;
    summary.target = target;
    summary.clues = join(clue_items, " ");
    if (keys.empty()) {
        summary.reason = "the question is not in memory";
    } else if (!new_keys.empty()) {
        summary.reason = "recorded " + join(new_keys, ", ") + " from the current chunk";
    } else {
        summary.reason = "nothing new for the question in the current chunk";
    }
    if (complete && request.allow_stop) {
        summary.decision = protocol::Decision::Stop;
        summary.final_answer = join(values, ", ");
    }
    return protocol::render(summary);
}

std::string SimSession::run_passage_program(const GenerateRequest& request) {
    const auto facts = visible_facts();
    std::string target;
    std::set<std::string> seen;
    std::size_t fresh = 0;
    for (const auto& f : facts) {
        if (const auto* q = fact_as<QueryFact>(f)) {
            target = q->text;
        } else if (const auto* s = fact_as<SummaryFact>(f)) {
            if (!s->summary.target.empty()) target = s->summary.target;
            const std::string& clues = s->summary.clues;
            const auto pos = clues.find("seen=");
            if (pos == std::string::npos) continue;
            std::string_view list = std::string_view(clues).substr(pos + 5);
            list = list.substr(0, list.find_first_of(" \n"));
            while (!list.empty()) {
                const auto comma = list.find(',');
                seen.emplace(list.substr(0, comma));
                if (comma == std::string_view::npos) break;
                list.remove_prefix(comma + 1);
            }
        }
    }
    for (const auto& f : facts) {
        if (const auto* p = fact_as<PassageFact>(f)) {
            if (seen.insert(p->fingerprint).second) ++fresh;
        }
    }

    if (request.mode == GenerateMode::Answer) return std::to_string(seen.size());

    protocol::ContextualSummary summary;
    summary.target = target;
    summary.clues = "count=" + std::to_string(seen.size()) +
                    " seen=" + join(std::vector<std::string>(seen.begin(), seen.end()), ",");
    summary.reason = "counted " + std::to_string(fresh) + " new passages in the current chunk";
    return protocol::render(summary);
}

std::string SimSession::run_echo_program(const GenerateRequest& request) const {
    if (request.max_tokens == 0 || request.max_tokens >= buffer_.size()) return buffer_text();
    std::size_t begin = buffer_.size() - request.max_tokens;
    while (begin < buffer_.size() && !buffer_[begin].first_piece) ++begin;
    std::string s;
    bool first = true;
    for (std::size_t i = begin; i < buffer_.size(); ++i) {
        const auto& t = buffer_[i];
        if (!t.first_piece) continue;
        if (!first) s += (t.lead.empty() && t.feed_start) ? std::string("\n") : t.lead;
        s += t.word;
        first = false;
    }
    return s;
}

SimBackend::SimBackend(std::optional<std::size_t> window, SimCost cost) : window_(window), cost_(cost) {
    if (window_ && *window_ == 0) throw Error(ErrorCode::InvalidConfig, "window must be positive");
}

std::unique_ptr<Session> SimBackend::open_session(Task task) { return open_sim_session(program_for(task)); }

std::unique_ptr<SimSession> SimBackend::open_sim_session(TaskProgram program) {
    SimConfig cfg;
    cfg.window = window_;
    cfg.program = program;
    cfg.cost = cost_;
    return std::make_unique<SimSession>(std::string(name()) + "-" + std::to_string(next_id_++), cfg);
}

std::string_view SimBackend::name() const noexcept { return window_ ? "sim-swa" : "sim-attn"; }

}  // namespace smoothread::backends
