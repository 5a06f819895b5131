// SPDX-License-Identifier: Apache-2.0
#include "smoothread/text.hpp"

namespace smoothread::text {

bool is_unicode_space(char32_t cp) noexcept {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& out) noexcept {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        out = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        out = 0xFFFD;
        return 1;
    }
    if (pos + len > s.size()) {
        out = 0xFFFD;
        return 1;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            out = 0xFFFD;
            return 1;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    out = cp;
    return len;
}

std::u32string to_code_points(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        char32_t cp;
        i += decode_utf8(s, i, cp);
        out.push_back(cp);
    }
    return out;
}

std::size_t count_words(std::string_view s) noexcept {
    std::size_t words = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < s.size();) {
        char32_t cp;
        i += decode_utf8(s, i, cp);
        const bool space = is_unicode_space(cp);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

bool starts_with_space(std::string_view s) noexcept {
    if (s.empty()) return false;
    char32_t cp;
    decode_utf8(s, 0, cp);
    return is_unicode_space(cp);
}

bool ends_with_space(std::string_view s) noexcept {
    if (s.empty()) return false;
    // Walk back to the start of the last code point.
    std::size_t pos = s.size() - 1;
    while (pos > 0 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80 && s.size() - pos < 4) --pos;
    char32_t cp;
    const std::size_t len = decode_utf8(s, pos, cp);
    if (pos + len != s.size()) cp = 0xFFFD;
    return is_unicode_space(cp);
}

std::vector<Word> split_words(std::string_view s) {
    std::vector<Word> words;
    std::size_t space_start = 0;
    std::size_t word_start = std::string_view::npos;
    for (std::size_t i = 0; i < s.size();) {
        char32_t cp;
        const std::size_t len = decode_utf8(s, i, cp);
        const bool space = is_unicode_space(cp);
        if (space && word_start != std::string_view::npos) {
            words.push_back({s.substr(space_start, word_start - space_start),
                             s.substr(word_start, i - word_start)});
            word_start = std::string_view::npos;
            space_start = i;
        } else if (!space && word_start == std::string_view::npos) {
            word_start = i;
        }
        i += len;
    }
    if (word_start != std::string_view::npos) {
        words.push_back({s.substr(space_start, word_start - space_start), s.substr(word_start)});
    }
    return words;
}

}  // namespace smoothread::text
