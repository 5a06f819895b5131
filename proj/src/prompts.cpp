// SPDX-License-Identifier: Apache-2.0
#include "smoothread/prompts.hpp"

#include "smoothread/assets.hpp"
#include "smoothread/error.hpp"

namespace smoothread::prompts {

namespace {

std::string_view load(std::string_view version, std::string_view name) {
    const std::string path = "prompts/" + std::string(version) + "/" + std::string(name) + ".txt";
    const auto data = assets::find(path);
    if (!data) throw Error(ErrorCode::ConfigError, "no prompt template " + path);
    return *data;
}

std::string fill(std::string_view tmpl, std::string_view query) {
    static constexpr std::string_view kSlot = "{query}";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto hit = tmpl.find(kSlot, pos);
        out.append(tmpl.substr(pos, hit - pos));
        if (hit == std::string_view::npos) break;
        out.append(query);
        pos = hit + kSlot.size();
    }
    return out;
}

}  // namespace

std::string smooth_preamble(std::string_view query, std::string_view version) {
    return fill(load(version, "smooth_preamble"), query);
}

std::string unsmooth_suffix(std::string_view query, std::string_view version) {
    return fill(load(version, "unsmooth_suffix"), query);
}

std::string one_step_preamble(std::string_view query, std::string_view version) {
    return fill(load(version, "one_step_preamble"), query);
}

std::string answer_prompt(std::string_view version) { return std::string(load(version, "answer_prompt")); }

}  // namespace smoothread::prompts
