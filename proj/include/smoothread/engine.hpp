// SPDX-License-Identifier: Apache-2.0
//
// One-Step, Unsmooth Reading and Smooth Reading over a backend session.
//
// Token counts are estimates (Int(1.5 * words)) taken per fed or generated
// piece of text, which is exactly what the simulators charge.
#pragma once

#include "smoothread/backend.hpp"
#include "smoothread/chunker.hpp"
#include "smoothread/protocol.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::engine {

enum class Strategy { OneStep, Unsmooth, Smooth };

std::string_view to_string(Strategy s);
// Accepts "one-step", "unsmooth", "smooth"; throws ConfigError otherwise.
Strategy strategy_from_string(std::string_view name);

enum class StepDecision { Continue, Stop, NotApplicable };

std::string_view to_string(StepDecision d);

struct StepRecord {
    std::size_t step_index = 0;
    std::optional<std::size_t> chunk_index;  // empty for scaffold and answer steps
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    std::size_t mr_tokens = 0;
    StepDecision decision = StepDecision::NotApplicable;
    double time_seconds = 0.0;     // backend clock delta of this step
    bool summary_overflow = false;  // summary exceeded c and was truncated
    std::string output;             // generated text, as returned by the backend
};

// input_tokens + output_tokens
std::size_t memory_requirement(const StepRecord& step) noexcept;

struct InferenceTrace {
    Strategy strategy = Strategy::OneStep;
    std::string backend;
    std::vector<StepRecord> steps;
    std::string answer;
    std::size_t total_prefill_tokens = 0;
    std::size_t total_decode_tokens = 0;
    std::size_t peak_mr_tokens = 0;
    double virtual_time_seconds = 0.0;
    std::size_t chunks_read = 0;
    std::size_t chunks_total = 0;
    std::size_t scaffold_tokens = 0;  // K: the largest fixed prompt scaffold fed in one step
    std::size_t chunk_tokens = 0;     // c
    bool early_stop = true;
    std::vector<protocol::ContextualSummary> summaries;  // I_0, I_1, ... as used by the engine

    // Total prefill + decode tokens.
    std::size_t processed_tokens() const noexcept { return total_prefill_tokens + total_decode_tokens; }
};

struct RunOptions {
    bool early_stop = true;
    // c. Summaries estimated above c are truncated (clues tail first). 0 takes
    // the largest chunk estimate.
    std::size_t chunk_tokens = 0;
};

// The session must be fresh. Failures of the backend other than library errors
// are wrapped as BackendError.
InferenceTrace run_one_step(backends::Session& session, std::string_view context, std::string_view query);

// Throws ProtocolError (with the step index in the message) when a summary does
// not parse.
InferenceTrace run_unsmooth(backends::Session& session, const std::vector<chunker::Chunk>& chunks,
                            std::string_view query, const RunOptions& options = {});

InferenceTrace run_smooth(backends::Session& session, const std::vector<chunker::Chunk>& chunks,
                          std::string_view query, const RunOptions& options = {});

// Dispatches on strategy; chunks are ignored by OneStep, context by the others.
InferenceTrace run(Strategy strategy, backends::Session& session, std::string_view context,
                   const std::vector<chunker::Chunk>& chunks, std::string_view query, const RunOptions& options = {});

// Largest fixed scaffold the strategy feeds in one step for this query.
std::size_t scaffold_tokens(Strategy strategy, std::string_view query);

// Shortens clues (then reason) from the tail until the rendered summary
// estimates at most `limit` tokens. Returns true when anything was cut.
bool truncate_summary(protocol::ContextualSummary& summary, std::size_t limit);

}  // namespace smoothread::engine
