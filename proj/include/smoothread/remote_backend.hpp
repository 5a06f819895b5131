// SPDX-License-Identifier: Apache-2.0
//
// OpenAI-compatible chat-completions client used as a real model backend and
// as the LLM teacher for dataset construction.
#pragma once

#include "smoothread/backend.hpp"

#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace smoothread::backends {

std::string default_one_shot_example();

struct RemoteBackendConfig {
    std::string endpoint_url;  // base URL ("http://host:8000/v1") or full .../chat/completions URL
    std::string model_name = "default";
    std::string api_key;
    double request_timeout_seconds = 120.0;
    int max_retries = 3;
    double backoff_initial_seconds = 1.0;  // doubled after every failed attempt
    double temperature = 0.0;
    std::size_t max_tokens = 1024;
    std::string one_shot_example = default_one_shot_example();

    // Reads ENDPOINT_URL and API_KEY; other fields keep their defaults.
    static RemoteBackendConfig from_env();
};

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct RemoteCallRecord {
    int attempts = 0;
    int status = 0;
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
    double seconds = 0.0;
};

class RemoteClient {
public:
    explicit RemoteClient(RemoteBackendConfig config);

    // POSTs a chat-completions request and returns the assistant text. Retries
    // connection failures, HTTP 429 and 5xx with exponential backoff. Throws
    // RemoteUnavailable when retries are exhausted (or on a non-retryable HTTP
    // status) and RemoteProtocolError on a malformed response body.
    std::string generate(const std::vector<ChatMessage>& messages, std::optional<std::size_t> max_tokens = {});

    std::vector<RemoteCallRecord> call_log() const;
    const RemoteBackendConfig& config() const noexcept { return config_; }

private:
    RemoteBackendConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    mutable std::mutex log_mutex_;
    std::vector<RemoteCallRecord> log_;
};

// Free-function form of RemoteClient::generate.
std::string remote_generate(const RemoteBackendConfig& config, const std::vector<ChatMessage>& messages);

// Session over a chat model: fed text accumulates into the pending user turn,
// generate() sends the whole conversation, reset() forgets it. The clock
// accumulates wall time spent in requests.
class RemoteSession final : public Session {
public:
    RemoteSession(std::string id, RemoteClient& client);

    void feed(std::string_view text, SourceTag tag) override;
    std::string generate(const GenerateRequest& request) override;
    void reset() override;
    std::string_view kind() const noexcept override { return "remote"; }

    const std::vector<ChatMessage>& history() const noexcept { return history_; }

private:
    RemoteClient& client_;
    std::vector<ChatMessage> history_;
    std::string pending_;
};

class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteBackendConfig config);

    std::unique_ptr<Session> open_session(Task task) override;
    std::string_view name() const noexcept override { return "remote"; }
    RemoteClient& client() noexcept { return client_; }

private:
    RemoteClient client_;
    std::mutex id_mutex_;
    unsigned long next_id_ = 0;
};

// System prompt with the summary format and the one-shot example.
std::string remote_system_prompt(const RemoteBackendConfig& config);

}  // namespace smoothread::backends
