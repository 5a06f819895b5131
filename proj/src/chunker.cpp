// SPDX-License-Identifier: Apache-2.0
#include "smoothread/chunker.hpp"

#include "smoothread/error.hpp"
#include "smoothread/text.hpp"

#include <optional>

namespace smoothread::chunker {

std::size_t tokens_for_words(std::size_t words, TokenRatio ratio) noexcept {
    return words * ratio.num / ratio.den;
}

std::size_t estimate_tokens(std::string_view text, TokenRatio ratio) {
    return tokens_for_words(text::count_words(text), ratio);
}

std::vector<std::string> default_delimiters() {
    return {"\n\n\n", "\n\n", "\n", ". ", ".", "! ", "? ", ", ", "; ", ": ", " -- ", " "};
}

void ChunkingConfig::validate() const {
    if (delimiters.empty()) throw Error(ErrorCode::InvalidConfig, "delimiter list is empty");
    for (const auto& d : delimiters) {
        if (d.empty()) throw Error(ErrorCode::InvalidConfig, "empty delimiter");
    }
    if (max_chunk_tokens == 0) throw Error(ErrorCode::InvalidConfig, "max_chunk_tokens must be >= 1");
    if (token_ratio.den == 0) throw Error(ErrorCode::InvalidConfig, "token ratio denominator is zero");
}

namespace {

struct Span {
    std::size_t begin;
    std::size_t end;
    std::size_t words;
};

class Splitter {
public:
    Splitter(std::string_view source, const ChunkingConfig& config) : src_(source), cfg_(config) {}

    std::vector<Span> run() {
        split(0, src_.size(), 0);
        return std::move(out_);
    }

private:
    std::size_t tokens(std::size_t words) const { return tokens_for_words(words, cfg_.token_ratio); }

    std::size_t words_in(std::size_t b, std::size_t e) const { return text::count_words(src_.substr(b, e - b)); }

    // 1 when the two adjacent spans glue a word together across the boundary.
    bool joins(std::size_t left_b, std::size_t mid, std::size_t right_e) const {
        return !text::ends_with_space(src_.substr(left_b, mid - left_b)) &&
               !text::starts_with_space(src_.substr(mid, right_e - mid));
    }

    void split(std::size_t begin, std::size_t end, std::size_t level) {
        const std::size_t words = words_in(begin, end);
        if (tokens(words) <= cfg_.max_chunk_tokens || level >= cfg_.delimiters.size()) {
            out_.push_back({begin, end, words});
            return;
        }

        const std::string& delim = cfg_.delimiters[level];
        std::vector<std::pair<std::size_t, std::size_t>> segments;
        const std::string_view region = src_.substr(begin, end - begin);
        std::size_t seg_begin = begin;
        for (std::size_t pos = region.find(delim); pos != std::string_view::npos;
             pos = region.find(delim, pos + delim.size())) {
            const std::size_t cut = begin + pos + delim.size();
            if (cut >= end) break;
            segments.emplace_back(seg_begin, cut);
            seg_begin = cut;
        }
        if (segments.empty()) {
            split(begin, end, level + 1);
            return;
        }
        segments.emplace_back(seg_begin, end);

        std::optional<Span> current;
        auto flush = [&] {
            if (current) out_.push_back(*current);
            current.reset();
        };
        for (const auto& [sb, se] : segments) {
            const std::size_t w = words_in(sb, se);
            if (tokens(w) > cfg_.max_chunk_tokens) {
                flush();
                split(sb, se, level + 1);
                continue;
            }
            if (!current) {
                current = Span{sb, se, w};
                continue;
            }
            const std::size_t merged = current->words + w - (joins(current->begin, sb, se) && w > 0 ? 1 : 0);
            if (tokens(merged) <= cfg_.max_chunk_tokens) {
                current->end = se;
                current->words = merged;
            } else {
                flush();
                current = Span{sb, se, w};
            }
        }
        flush();
    }

    std::string_view src_;
    const ChunkingConfig& cfg_;
    std::vector<Span> out_;
};

}  // namespace

std::vector<Chunk> split_hierarchical(std::string_view text, const ChunkingConfig& config) {
    config.validate();
    if (text.empty()) throw Error(ErrorCode::EmptyInput, "cannot chunk an empty text");

    const auto spans = Splitter(text, config).run();
    std::vector<Chunk> chunks;
    chunks.reserve(spans.size());
    for (const auto& s : spans) {
        chunks.push_back(Chunk{chunks.size(), std::string(text.substr(s.begin, s.end - s.begin)),
                               tokens_for_words(s.words, config.token_ratio), ByteSpan{s.begin, s.end}});
    }
    return chunks;
}

}  // namespace smoothread::chunker
