// SPDX-License-Identifier: Apache-2.0
//
// Hierarchical delimiter chunking with word-based token estimation.
//
// The text is split on the highest-priority delimiter that occurs in it, the
// pieces are merged left to right while the merged span stays within the token
// budget, and any piece that is still too large is split again one delimiter
// level down. Delimiters stay attached to the piece that precedes them, so the
// chunks always concatenate back to the input.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::chunker {

struct TokenRatio {
    std::size_t num = 3;
    std::size_t den = 2;
};

// Int(ratio * n_words), truncating toward zero.
std::size_t estimate_tokens(std::string_view text, TokenRatio ratio = {});
std::size_t tokens_for_words(std::size_t words, TokenRatio ratio = {}) noexcept;

std::vector<std::string> default_delimiters();

struct ChunkingConfig {
    std::vector<std::string> delimiters = default_delimiters();
    std::size_t max_chunk_tokens = 1024;
    TokenRatio token_ratio{};

    // Throws InvalidConfig when the delimiter list is empty or contains an
    // empty string, when max_chunk_tokens is zero, or when the ratio has a
    // zero denominator.
    void validate() const;
};

struct ByteSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Chunk {
    std::size_t index = 0;
    std::string text;
    std::size_t est_tokens = 0;
    ByteSpan byte_span;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Throws EmptyInput on an empty text.
std::vector<Chunk> split_hierarchical(std::string_view text, const ChunkingConfig& config);

}  // namespace smoothread::chunker
