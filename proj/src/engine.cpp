// SPDX-License-Identifier: Apache-2.0
#include "smoothread/engine.hpp"

#include "smoothread/error.hpp"
#include "smoothread/prompts.hpp"
#include "smoothread/text.hpp"

#include <algorithm>

namespace smoothread::engine {

using backends::GenerateMode;
using backends::GenerateRequest;
using backends::Session;
using backends::SourceTag;
using chunker::estimate_tokens;

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::OneStep: return "one-step";
        case Strategy::Unsmooth: return "unsmooth";
        case Strategy::Smooth: return "smooth";
    }
    return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
    if (name == "one-step") return Strategy::OneStep;
    if (name == "unsmooth") return Strategy::Unsmooth;
    if (name == "smooth") return Strategy::Smooth;
    throw Error(ErrorCode::ConfigError, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(StepDecision d) {
    switch (d) {
        case StepDecision::Continue: return "continue";
        case StepDecision::Stop: return "stop";
        case StepDecision::NotApplicable: return "n/a";
    }
    return "unknown";
}

std::size_t memory_requirement(const StepRecord& step) noexcept { return step.input_tokens + step.output_tokens; }

std::size_t scaffold_tokens(Strategy strategy, std::string_view query) {
    const std::size_t answer = estimate_tokens(prompts::answer_prompt());
    switch (strategy) {
        case Strategy::OneStep: return estimate_tokens(prompts::one_step_preamble(query));
        case Strategy::Unsmooth: return std::max(estimate_tokens(prompts::unsmooth_suffix(query)), answer);
        case Strategy::Smooth: return std::max(estimate_tokens(prompts::smooth_preamble(query)), answer);
    }
    return 0;
}

bool truncate_summary(protocol::ContextualSummary& summary, std::size_t limit) {
    auto fits = [&] { return estimate_tokens(protocol::render(summary)) <= limit; };
    if (fits()) return false;
    // Drop whole words from the end of a field, keeping its head.
    auto shorten = [&](std::string& field) {
        while (!field.empty() && !fits()) {
            auto words = text::split_words(field);
            if (words.size() <= 1) {
                field.clear();
                break;
            }
            const auto& last = words.back();
            field.resize(static_cast<std::size_t>(last.leading_space.data() - field.data()));
        }
    };
    shorten(summary.clues);
    shorten(summary.reason);
    return true;
}

namespace {

// Wraps foreign exceptions from a backend call.
template <class F>
auto call_backend(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::BackendError, e.what());
    }
}

class Runner {
public:
    Runner(Session& session, Strategy strategy, std::size_t chunks_total) : session_(session) {
        trace_.strategy = strategy;
        trace_.backend = std::string(session.kind());
        trace_.chunks_total = chunks_total;
        start_clock_ = session.clock_seconds();
    }

    void begin_step(std::optional<std::size_t> chunk_index) {
        current_ = StepRecord{};
        current_.step_index = trace_.steps.size();
        current_.chunk_index = chunk_index;
        step_clock_ = session_.clock_seconds();
    }

    void reset() {
        call_backend([&] { session_.reset(); });
    }

    void feed(std::string_view text, SourceTag tag) {
        call_backend([&] { session_.feed(text, tag); });
        current_.input_tokens += estimate_tokens(text);
    }

    std::string generate(const GenerateRequest& request) {
        std::string out = call_backend([&] { return session_.generate(request); });
        current_.output_tokens += estimate_tokens(out);
        current_.output = out;
        return out;
    }

    protocol::ContextualSummary parse_summary(const std::string& out) {
        try {
            return protocol::parse(out);
        } catch (const Error& e) {
            throw Error(ErrorCode::ProtocolError,
                        "step " + std::to_string(current_.step_index) + ": " + std::string(e.what()));
        }
    }

    StepRecord& step() { return current_; }

    void end_step(StepDecision decision) {
        current_.decision = decision;
        current_.mr_tokens = memory_requirement(current_);
        current_.time_seconds = session_.clock_seconds() - step_clock_;
        trace_.steps.push_back(std::move(current_));
    }

    InferenceTrace finish() {
        for (const auto& s : trace_.steps) {
            trace_.total_prefill_tokens += s.input_tokens;
            trace_.total_decode_tokens += s.output_tokens;
            trace_.peak_mr_tokens = std::max(trace_.peak_mr_tokens, s.mr_tokens);
        }
        trace_.virtual_time_seconds = session_.clock_seconds() - start_clock_;
        return std::move(trace_);
    }

    InferenceTrace& trace() { return trace_; }

private:
    Session& session_;
    InferenceTrace trace_;
    StepRecord current_;
    double start_clock_ = 0.0;
    double step_clock_ = 0.0;
};

std::size_t resolve_chunk_tokens(const std::vector<chunker::Chunk>& chunks, const RunOptions& options) {
    if (options.chunk_tokens > 0) return options.chunk_tokens;
    std::size_t c = 1;
    for (const auto& ch : chunks) c = std::max(c, ch.est_tokens);
    return c;
}

StepDecision to_step_decision(protocol::Decision d) {
    return d == protocol::Decision::Stop ? StepDecision::Stop : StepDecision::Continue;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Summary as it is kept for the next step: truncated to c, and without a stop
// decision when early stopping is off.
protocol::ContextualSummary carried(protocol::ContextualSummary s, bool early_stop) {
    if (!early_stop && s.decision == protocol::Decision::Stop) {
        s.decision = protocol::Decision::Continue;
        s.final_answer.reset();
    }
    return s;
}

void check_chunks(const std::vector<chunker::Chunk>& chunks) {
    if (chunks.empty()) throw Error(ErrorCode::EmptyInput, "no chunks to read");
}

}  // namespace

InferenceTrace run_one_step(Session& session, std::string_view context, std::string_view query) {
    Runner r(session, Strategy::OneStep, 1);
    r.trace().scaffold_tokens = scaffold_tokens(Strategy::OneStep, query);
    r.trace().chunk_tokens = estimate_tokens(context);
    r.begin_step(0);
    if (!context.empty()) r.feed(context, SourceTag::Context);
    r.feed(prompts::one_step_preamble(query), SourceTag::Scaffold);
    GenerateRequest req;
    req.mode = GenerateMode::Answer;
    r.trace().answer = trim(r.generate(req));
    r.end_step(StepDecision::NotApplicable);
    r.trace().chunks_read = 1;
    return r.finish();
}

InferenceTrace run_unsmooth(Session& session, const std::vector<chunker::Chunk>& chunks, std::string_view query,
                            const RunOptions& options) {
    check_chunks(chunks);
    Runner r(session, Strategy::Unsmooth, chunks.size());
    const std::size_t c = resolve_chunk_tokens(chunks, options);
    auto& t = r.trace();
    t.scaffold_tokens = scaffold_tokens(Strategy::Unsmooth, query);
    t.chunk_tokens = c;
    t.early_stop = options.early_stop;

    const std::string suffix = prompts::unsmooth_suffix(query);
    std::optional<protocol::ContextualSummary> prev;
    bool stopped = false;
    for (const auto& chunk : chunks) {
        r.begin_step(chunk.index);
        r.reset();
        if (prev) r.feed(protocol::render(*prev), SourceTag::Summary);
        r.feed(chunk.text, SourceTag::Context);
        r.feed(suffix, SourceTag::Scaffold);
        GenerateRequest req;
        req.allow_stop = options.early_stop;
        auto summary = r.parse_summary(r.generate(req));
        r.step().summary_overflow = truncate_summary(summary, c);
        ++t.chunks_read;
        r.end_step(to_step_decision(summary.decision));
        t.summaries.push_back(summary);
        if (options.early_stop && summary.decision == protocol::Decision::Stop) {
            t.answer = *summary.final_answer;
            stopped = true;
            break;
        }
        prev = carried(std::move(summary), options.early_stop);
    }

    if (!stopped) {
        r.begin_step(std::nullopt);
        r.reset();
        r.feed(protocol::render(*prev), SourceTag::Summary);
        r.feed(prompts::answer_prompt(), SourceTag::Scaffold);
        GenerateRequest req;
        req.mode = GenerateMode::Answer;
        t.answer = trim(r.generate(req));
        r.end_step(StepDecision::NotApplicable);
    }
    return r.finish();
}

InferenceTrace run_smooth(Session& session, const std::vector<chunker::Chunk>& chunks, std::string_view query,
                          const RunOptions& options) {
    check_chunks(chunks);
    Runner r(session, Strategy::Smooth, chunks.size());
    const std::size_t c = resolve_chunk_tokens(chunks, options);
    auto& t = r.trace();
    t.scaffold_tokens = scaffold_tokens(Strategy::Smooth, query);
    t.chunk_tokens = c;
    t.early_stop = options.early_stop;

    r.begin_step(std::nullopt);
    r.feed(prompts::smooth_preamble(query), SourceTag::Scaffold);
    r.end_step(StepDecision::NotApplicable);

    bool stopped = false;
    for (const auto& chunk : chunks) {
        r.begin_step(chunk.index);
        // The trailing newline separates the chunk from the summary decoded after it.
        r.feed(chunk.text + "\n", SourceTag::Context);
        GenerateRequest req;
        req.allow_stop = options.early_stop;
        auto summary = r.parse_summary(r.generate(req));
        r.step().summary_overflow = truncate_summary(summary, c);
        ++t.chunks_read;
        r.end_step(to_step_decision(summary.decision));
        t.summaries.push_back(summary);
        if (options.early_stop && summary.decision == protocol::Decision::Stop) {
            t.answer = *summary.final_answer;
            stopped = true;
            break;
        }
    }

    if (!stopped) {
        r.begin_step(std::nullopt);
        r.feed(prompts::answer_prompt(), SourceTag::Scaffold);
        GenerateRequest req;
        req.mode = GenerateMode::Answer;
        t.answer = trim(r.generate(req));
        r.end_step(StepDecision::NotApplicable);
    }
    return r.finish();
}

InferenceTrace run(Strategy strategy, Session& session, std::string_view context,
                   const std::vector<chunker::Chunk>& chunks, std::string_view query, const RunOptions& options) {
    switch (strategy) {
        case Strategy::OneStep: return run_one_step(session, context, query);
        case Strategy::Unsmooth: return run_unsmooth(session, chunks, query, options);
        case Strategy::Smooth: return run_smooth(session, chunks, query, options);
    }
    throw Error(ErrorCode::ConfigError, "unknown strategy");
}

}  // namespace smoothread::engine
