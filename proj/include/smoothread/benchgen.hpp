// SPDX-License-Identifier: Apache-2.0
//
// Synthetic long-context items (needle-in-a-haystack, passage counting) and a
// JSONL loader for external corpora.
#pragma once

#include "smoothread/eval_item.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::benchgen {

enum class Placement { UniformRandom, OffsetFromEnd };

struct NiahSpec {
    std::size_t context_tokens = 16384;
    std::size_t num_needles = 1;
    Placement placement = Placement::UniformRandom;
    // One token offset per needle, counted back from the end of the context.
    std::vector<std::size_t> offsets_from_end;
    std::string haystack_path;  // empty: the bundled essays
    std::uint64_t seed = 0;
};

// Needles are snapped to the nearest sentence start within this many tokens of
// the requested position, else to the nearest word boundary.
inline constexpr std::size_t kSnapTokens = 16;

std::string_view bundled_haystack();

// Deterministic in the spec. meta holds "needle_positions" (estimated token
// index of each needle's first word, in key order), "seed", "spec",
// "haystack_cycled" and "warnings". Errors: InvalidOffset for an offset not
// below context_tokens, InvalidConfig for a needle count of zero, above the
// key vocabulary, or not matching the offsets, IoError for an unreadable
// haystack.
EvalItem gen_niah(const NiahSpec& spec);

// `count` items; item i uses a seed derived from (spec.seed, i).
std::vector<EvalItem> gen_niah_suite(const NiahSpec& spec, std::size_t count);

struct PassageCountSpec {
    std::size_t unique_passages = 5;
    std::size_t copies = 1;             // occurrences of every passage, >= 1
    std::vector<std::string> pool;      // empty: paragraphs of the bundled essays
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kPassageCountQuery = "How many unique paragraphs does the document contain?";

// Passages are rendered "Paragraph <n>: <text>" in shuffled order, separated by
// blank lines; gold is the number of unique passages. Throws InsufficientPool
// when the pool holds fewer distinct passages than requested.
EvalItem gen_passage_count(const PassageCountSpec& spec);

std::vector<std::string> bundled_passage_pool();

// Maps EvalItem field names ("id", "context", "query", "gold", "task") to the
// names used in the source file. Unmapped fields use their own name.
using FieldMap = std::map<std::string, std::string>;

struct LoadIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct LoadResult {
    std::vector<EvalItem> items;
    std::vector<LoadIssue> errors;
};

// gold may be a string or an array of strings; a missing task field falls back
// to `default_task`. Throws IoError when the file cannot be read.
LoadResult load_jsonl(const std::string& path, const FieldMap& field_map = {},
                      Task default_task = Task::QuestionAnswering);

// One JSON object per line. Throws IoError.
void write_jsonl(const std::string& path, const std::vector<EvalItem>& items);

}  // namespace smoothread::benchgen
