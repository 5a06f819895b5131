// SPDX-License-Identifier: Apache-2.0
//
// Model contract: a session consumes text into its memory, generates text that
// also enters its memory, and can have its memory reset.
#pragma once

#include "smoothread/task.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace smoothread::backends {

enum class SourceTag { Context, Summary, Scaffold };

enum class GenerateMode { Summary, Answer };

struct GenerateRequest {
    GenerateMode mode = GenerateMode::Summary;
    bool allow_stop = true;     // false asks the model to keep reading
    std::size_t max_tokens = 0;  // 0 = no limit
};

enum class CallKind { Feed, Generate, Reset };

struct CallRecord {
    CallKind kind;
    std::size_t tokens;
    double clock_after;
};

std::string_view to_string(CallKind kind);

class Session {
public:
    virtual ~Session() = default;

    virtual void feed(std::string_view text, SourceTag tag) = 0;
    virtual std::string generate(const GenerateRequest& request) = 0;
    virtual void reset() = 0;

    void close() noexcept { closed_ = true; }
    bool closed() const noexcept { return closed_; }

    double clock_seconds() const noexcept { return clock_; }
    const std::vector<CallRecord>& call_log() const noexcept { return log_; }
    const std::string& session_id() const noexcept { return id_; }

    // "sim-swa", "sim-attn" or "remote".
    virtual std::string_view kind() const noexcept = 0;

protected:
    explicit Session(std::string id) : id_(std::move(id)) {}

    void ensure_open() const;
    void advance_clock(double seconds) noexcept { clock_ += seconds; }
    void log(CallKind kind, std::size_t tokens) { log_.push_back({kind, tokens, clock_}); }

private:
    std::string id_;
    bool closed_ = false;
    double clock_ = 0.0;
    std::vector<CallRecord> log_;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::unique_ptr<Session> open_session(Task task) = 0;
    virtual std::string_view name() const noexcept = 0;
};

}  // namespace smoothread::backends
