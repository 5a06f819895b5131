// SPDX-License-Identifier: Apache-2.0
//
// Text files from assets/ compiled into the library.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace smoothread::assets {

// `name` is relative to assets/, e.g. "prompts/v1/answer_prompt.txt".
std::optional<std::string_view> find(std::string_view name);
std::vector<std::string_view> names();

}  // namespace smoothread::assets
