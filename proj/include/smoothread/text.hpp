// SPDX-License-Identifier: Apache-2.0
//
// Small UTF-8 helpers shared by the chunker, the simulators and the metrics.
// Invalid UTF-8 bytes decode to U+FFFD one byte at a time, so every input has a
// well-defined word count.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::text {

bool is_unicode_space(char32_t cp) noexcept;

// Decodes one code point starting at `pos` and returns its byte length (>= 1).
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& out) noexcept;

std::u32string to_code_points(std::string_view s);

// Number of maximal runs of non-whitespace code points.
std::size_t count_words(std::string_view s) noexcept;

bool starts_with_space(std::string_view s) noexcept;
bool ends_with_space(std::string_view s) noexcept;

struct Word {
    std::string_view leading_space;  // whitespace run immediately before the word
    std::string_view text;
};

// Words in order, each with the whitespace that precedes it. Trailing
// whitespace after the last word is not represented.
std::vector<Word> split_words(std::string_view s);

}  // namespace smoothread::text
