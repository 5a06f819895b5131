// SPDX-License-Identifier: Apache-2.0
//
// Simulated bounded-memory and unbounded models.
//
// Memory is a FIFO of tokens. Text is tokenized word by word so that a feed of
// n words yields exactly Int(1.5 n) tokens (words alternate between one and two
// token pieces), matching the chunker's estimator. With a window W the oldest
// token is evicted once the buffer holds W tokens; without one the buffer only
// grows.
//
// Recall follows the capacity law: the model recognizes a fact (a needle, the
// question, a contextual summary, a passage) at the moment the token completing
// it arrives, provided the whole fact is inside the buffer at that moment, and
// the fact stays recallable exactly as long as that completing token is still
// in the buffer. Task programs look only at the facts carried by tokens in the
// current buffer.
//
// Every token pushed costs p0 + p1 * occupancy seconds on the virtual clock,
// where occupancy is the buffer length after the push; generated tokens cost
// d_mult times as much.
#pragma once

#include "smoothread/backend.hpp"
#include "smoothread/chunker.hpp"
#include "smoothread/protocol.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace smoothread::backends {

enum class TaskProgram { NeedleRetrieval, PassageCount, Echo };

// Program used to serve a task; throws UnsupportedTask for tasks the simulator
// cannot answer.
TaskProgram program_for(Task task);

struct SimCost {
    double p0 = 1.0e-4;    // seconds per token
    double p1 = 6.4e-9;    // seconds per token per occupied buffer slot
    double d_mult = 12.0;  // decode / prefill cost ratio
};

struct SimConfig {
    std::optional<std::size_t> window;  // nullopt = unbounded self-attention
    TaskProgram program = TaskProgram::NeedleRetrieval;
    SimCost cost{};
    chunker::TokenRatio token_ratio{};
};

struct QueryFact {
    std::string text;
};
struct NeedleFact {
    std::string key;
    std::string value;
};
struct SummaryFact {
    protocol::ContextualSummary summary;
};
struct PassageFact {
    std::string fingerprint;
};
using Fact = std::variant<QueryFact, NeedleFact, SummaryFact, PassageFact>;

struct SimToken {
    std::string word;   // empty on continuation pieces
    std::string lead;   // whitespace before the word (first piece only)
    SourceTag tag = SourceTag::Context;
    bool first_piece = true;
    bool feed_start = false;
    std::shared_ptr<const Fact> fact;
};

class SimSession final : public Session {
public:
    SimSession(std::string id, SimConfig config);

    void feed(std::string_view text, SourceTag tag) override;
    std::string generate(const GenerateRequest& request) override;
    void reset() override;
    std::string_view kind() const noexcept override;

    const std::deque<SimToken>& buffer() const noexcept { return buffer_; }
    const SimConfig& config() const noexcept { return config_; }

    // Reconstructed text of the buffer (continuation pieces omitted).
    std::string buffer_text() const;

    // Facts carried by tokens currently in the buffer, oldest first.
    std::vector<std::shared_ptr<const Fact>> visible_facts() const;

private:
    std::size_t push_text(std::string_view text, SourceTag tag, double cost_multiplier);
    void push_token(SimToken token, double cost_multiplier);
    void recognize(SourceTag tag);
    void finalize_passage();

    std::string run_needle_program(const GenerateRequest& request);
    std::string run_passage_program(const GenerateRequest& request);
    std::string run_echo_program(const GenerateRequest& request) const;

    SimConfig config_;
    std::deque<SimToken> buffer_;
    bool passage_open_ = false;
};

class SimBackend final : public Backend {
public:
    // The task program is chosen per session from the task.
    explicit SimBackend(std::optional<std::size_t> window, SimCost cost = {});

    std::unique_ptr<Session> open_session(Task task) override;
    std::unique_ptr<SimSession> open_sim_session(TaskProgram program);
    std::string_view name() const noexcept override;

private:
    std::optional<std::size_t> window_;
    SimCost cost_;
    std::uint64_t next_id_ = 0;
};

}  // namespace smoothread::backends
