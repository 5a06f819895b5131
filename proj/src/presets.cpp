// SPDX-License-Identifier: Apache-2.0
#include "smoothread/presets.hpp"

#include "smoothread/error.hpp"

namespace smoothread::presets {

const std::vector<Preset>& all() {
    static const std::vector<Preset> presets = {
        {"longbench-swa", 1024},
        {"niah-swa", 2048},
        {"longbench-rwkv", 512},
        {"niah-rwkv", 256},
    };
    return presets;
}

const Preset& get(std::string_view name) {
    for (const auto& p : all()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : all()) known += (known.empty() ? "" : ", ") + p.name;
    throw Error(ErrorCode::ConfigError, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace smoothread::presets
