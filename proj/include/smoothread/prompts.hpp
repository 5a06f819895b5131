// SPDX-License-Identifier: Apache-2.0
//
// Prompt scaffolds wrapped around chunks and summaries. The templates live in
// assets/prompts/<version>/ and are compiled in; "{query}" is substituted.
#pragma once

#include <string>
#include <string_view>

namespace smoothread::prompts {

inline constexpr std::string_view kDefaultVersion = "v1";

// Fed once before the first chunk in Smooth Reading.
std::string smooth_preamble(std::string_view query, std::string_view version = kDefaultVersion);
// Fed after the chunk in every Unsmooth Reading step.
std::string unsmooth_suffix(std::string_view query, std::string_view version = kDefaultVersion);
// Fed after the whole context in One-Step inference.
std::string one_step_preamble(std::string_view query, std::string_view version = kDefaultVersion);
// Fed when every chunk was read without a stop decision.
std::string answer_prompt(std::string_view version = kDefaultVersion);

}  // namespace smoothread::prompts
