// SPDX-License-Identifier: Apache-2.0
#include "smoothread/niah.hpp"

#include "smoothread/text.hpp"

#include <array>
#include <cctype>

namespace smoothread::niah {

namespace {

constexpr std::array<std::string_view, 120> kKeys = {
    "anchor",   "apricot",  "arrow",    "aster",    "badger",   "banner",   "basalt",   "beacon",
    "birch",    "bison",    "bramble",  "bronze",   "cactus",   "canyon",   "cedar",    "chalk",
    "cinder",   "cobalt",   "comet",    "coral",    "cricket",  "crystal",  "cypress",  "dahlia",
    "delta",    "dune",     "ember",    "falcon",   "fennel",   "fern",     "fjord",    "flint",
    "garnet",   "geyser",   "ginger",   "glacier",  "granite",  "gull",     "harbor",   "hazel",
    "heron",    "hollow",   "indigo",   "iris",     "ivory",    "jasper",   "juniper",  "kestrel",
    "lagoon",   "lantern",  "larch",    "lemon",    "lichen",   "linden",   "lotus",    "lynx",
    "magnet",   "mango",    "maple",    "marble",   "meadow",   "mesa",     "mint",     "mosaic",
    "nectar",   "nickel",   "nutmeg",   "oasis",    "obsidian", "olive",    "onyx",     "orchid",
    "osprey",   "otter",    "paddle",   "pebble",   "pepper",   "pine",     "plume",    "prairie",
    "quartz",   "quill",    "raven",    "reef",     "ripple",   "robin",    "saffron",  "sage",
    "salmon",   "sapphire", "sequoia",  "shale",    "sierra",   "silver",   "sparrow",  "spruce",
    "summit",   "tango",    "thistle",  "thunder",  "timber",   "topaz",    "tundra",   "tulip",
    "umber",    "valley",   "velvet",   "violet",   "walnut",   "willow",   "winter",   "wren",
    "yarrow",   "yucca",    "zephyr",   "zinc",     "zircon",   "acorn",    "bluff",    "clover",
};

bool is_key_word(std::string_view w) {
    if (w.empty()) return false;
    for (char c : w) {
        if (!std::islower(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string_view strip_trailing(std::string_view w, std::string_view chars) {
    while (!w.empty() && chars.find(w.back()) != std::string_view::npos) w.remove_suffix(1);
    return w;
}

}  // namespace

std::string needle_sentence(std::string_view key, std::string_view uuid) {
    std::string s = "The special magic word for ";
    s.append(key).append(" is ").append(uuid).append(".");
    return s;
}

std::string query_for(std::span<const std::string> keys) {
    if (keys.size() == 1) return "What is the special magic word for " + keys[0] + "?";
    std::string q = "What are the special magic words for ";
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i > 0) q += (i + 1 == keys.size()) ? " and " : ", ";
        q += keys[i];
    }
    q += "?";
    return q;
}

std::vector<std::string> keys_in_query(std::string_view query) {
    std::size_t pos = query.find("magic words for ");
    std::size_t skip = 16;
    if (pos == std::string_view::npos) {
        pos = query.find("magic word for ");
        skip = 15;
    }
    if (pos == std::string_view::npos) return {};
    std::string_view rest = query.substr(pos + skip);
    if (const auto q = rest.find('?'); q != std::string_view::npos) rest = rest.substr(0, q);

    std::vector<std::string> keys;
    for (const auto& w : text::split_words(rest)) {
        std::string_view word = strip_trailing(w.text, ",.;");
        if (word == "and") continue;
        if (!is_key_word(word)) return {};
        keys.emplace_back(word);
    }
    return keys;
}

bool is_uuid(std::string_view s) noexcept {
    if (s.size() != 36) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (c != '-') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

std::string make_uuid(std::mt19937_64& rng) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t hi = rng();
    std::uint64_t lo = rng();
    hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
    lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 32; ++i) {
        const std::uint64_t word = i < 16 ? hi : lo;
        const int shift = 60 - 4 * (i % 16);
        out.push_back(kHex[(word >> shift) & 0xF]);
        if (i == 7 || i == 11 || i == 15 || i == 19) out.push_back('-');
    }
    return out;
}

bool match_needle_tail(std::span<const std::string_view> words, std::string& key, std::string& value) {
    if (words.size() < kNeedleWords) return false;
    const auto w = words.subspan(words.size() - kNeedleWords);
    const std::string_view last = w[7];
    if (last.size() != 37 || last.back() != '.') return false;
    if (!is_uuid(last.substr(0, 36))) return false;
    if (w[0] != "The" || w[1] != "special" || w[2] != "magic" || w[3] != "word" || w[4] != "for" || w[6] != "is")
        return false;
    if (!is_key_word(w[5])) return false;
    key = std::string(w[5]);
    value = std::string(last.substr(0, 36));
    return true;
}

std::vector<NeedleMatch> find_needles(std::string_view text) {
    const auto words = text::split_words(text);
    std::vector<std::string_view> window;
    std::vector<NeedleMatch> out;
    for (std::size_t i = 0; i + kNeedleWords <= words.size(); ++i) {
        window.clear();
        for (std::size_t j = i; j < i + kNeedleWords; ++j) window.push_back(words[j].text);
        NeedleMatch m;
        if (match_needle_tail(window, m.key, m.value)) {
            m.begin = static_cast<std::size_t>(words[i].text.data() - text.data());
            const auto& tail = words[i + kNeedleWords - 1].text;
            m.end = static_cast<std::size_t>(tail.data() - text.data()) + tail.size();
            out.push_back(std::move(m));
        }
    }
    return out;
}

std::span<const std::string_view> key_vocabulary() { return kKeys; }

std::string format_clue(std::string_view key, std::string_view value) {
    std::string s(key);
    s.push_back('=');
    s.append(value);
    return s;
}

std::vector<std::pair<std::string, std::string>> parse_clues(std::string_view clues) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& w : text::split_words(clues)) {
        const std::string_view word = strip_trailing(w.text, ",;.");
        const auto eq = word.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = word.substr(0, eq);
        const auto value = word.substr(eq + 1);
        if (is_key_word(key) && is_uuid(value)) out.emplace_back(key, value);
    }
    return out;
}

}  // namespace smoothread::niah
