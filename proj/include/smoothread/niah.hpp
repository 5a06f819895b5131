// SPDX-License-Identifier: Apache-2.0
//
// Needle-in-a-haystack vocabulary shared by the generator, the simulated task
// programs and the rule teacher.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::niah {

// "The special magic word for <key> is <uuid>."
std::string needle_sentence(std::string_view key, std::string_view uuid);

// Word count of a needle sentence; the template has a fixed shape.
inline constexpr std::size_t kNeedleWords = 8;

std::string query_for(std::span<const std::string> keys);

// Keys requested by a query or target restatement produced by query_for().
// Returns an empty list when the text does not follow the template.
std::vector<std::string> keys_in_query(std::string_view query);

bool is_uuid(std::string_view s) noexcept;

// Random RFC 4122 version-4 UUID, lowercase hex.
std::string make_uuid(std::mt19937_64& rng);

struct NeedleMatch {
    std::string key;
    std::string value;
    std::size_t begin = 0;  // byte offsets of the sentence in the searched text
    std::size_t end = 0;
};

// All needle sentences in `text`, in order of appearance.
std::vector<NeedleMatch> find_needles(std::string_view text);

// Tries to match a needle whose last word is words[last]. `words` are the
// whitespace-separated words of a stream; returns false when the preceding
// words do not complete the template.
bool match_needle_tail(std::span<const std::string_view> words, std::string& key, std::string& value);

std::span<const std::string_view> key_vocabulary();

// "alpha=<uuid> beta=<uuid>" clue encoding used inside CLUES bodies.
std::string format_clue(std::string_view key, std::string_view value);
std::vector<std::pair<std::string, std::string>> parse_clues(std::string_view clues);

}  // namespace smoothread::niah
