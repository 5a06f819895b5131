// SPDX-License-Identifier: Apache-2.0
//
// Evaluation chunk sizes: 1024 (LongBench) and 2048 (NIAH) for the
// sliding-window model, 512 and 256 for the RWKV model.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::presets {

struct Preset {
    std::string name;
    std::size_t chunk_tokens = 0;
};

// Library default when no preset is given (ChunkingConfig's default).
inline constexpr std::size_t kDefaultChunkTokens = 1024;

const std::vector<Preset>& all();

// Throws ConfigError for an unknown name.
const Preset& get(std::string_view name);

}  // namespace smoothread::presets
