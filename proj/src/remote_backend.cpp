// SPDX-License-Identifier: Apache-2.0
#include "smoothread/remote_backend.hpp"

#include "smoothread/chunker.hpp"
#include "smoothread/error.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace smoothread::backends {

using nlohmann::json;

std::string default_one_shot_example() {
    return "Question: What is the capital of the country where the Nile delta lies?\n"
           "Chunk: The Nile flows north through Sudan and Egypt before it fans out into a wide delta on the "
           "Mediterranean coast.\n"
           "TARGET: find the capital of the country that contains the Nile delta\n"
           "CLUES: the Nile delta is on the Mediterranean coast of Egypt\n"
           "REASON: the chunk places the delta in Egypt; the capital is not mentioned yet\n"
           "<CONTINUE>\n"
           "Chunk: Cairo, the capital of Egypt, sits just south of where the delta begins.\n"
           "TARGET: find the capital of the country that contains the Nile delta\n"
           "CLUES: the Nile delta is in Egypt; the capital of Egypt is Cairo\n"
           "REASON: the chunk names the capital of Egypt, which answers the question\n"
           "ANSWER: Cairo\n"
           "<STOP>";
}

std::string remote_system_prompt(const RemoteBackendConfig& config) {
    return "You read a long document one chunk at a time. After each chunk write a contextual summary in exactly "
           "this format:\n"
           "TARGET: <the task objective>\n"
           "CLUES: <all information gathered so far that helps with the task>\n"
           "REASON: <why the clues changed in this step>\n"
           "then either the line <CONTINUE> to read the next chunk, or a line 'ANSWER: <final answer>' followed by "
           "the line <STOP> once the task can be completed.\n\n"
           "Example:\n" +
           config.one_shot_example;
}

RemoteBackendConfig RemoteBackendConfig::from_env() {
    RemoteBackendConfig c;
    if (const char* url = std::getenv("ENDPOINT_URL")) c.endpoint_url = url;
    if (const char* key = std::getenv("API_KEY")) c.api_key = key;
    return c;
}

RemoteClient::RemoteClient(RemoteBackendConfig config) : config_(std::move(config)) {
    if (config_.max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
    const std::string& url = config_.endpoint_url;
    const auto scheme_end = url.find("://");
    if (url.empty() || scheme_end == std::string::npos)
        throw Error(ErrorCode::InvalidConfig, "endpoint URL must look like http://host[:port]/path, got '" + url + "'");
    const auto path_begin = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? std::string() : url.substr(path_begin);
    while (!path.empty() && path.back() == '/') path.pop_back();
    const std::string suffix = "/chat/completions";
    if (path.empty()) {
        path_ = "/v1" + suffix;
    } else if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        path_ = path;
    } else {
        path_ = path + suffix;
    }
}

std::vector<RemoteCallRecord> RemoteClient::call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

std::string RemoteClient::generate(const std::vector<ChatMessage>& messages, std::optional<std::size_t> max_tokens) {
    json body;
    body["model"] = config_.model_name;
    body["temperature"] = config_.temperature;
    body["max_tokens"] = max_tokens.value_or(config_.max_tokens);
    body["messages"] = json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();

    httplib::Client cli(scheme_host_port_);
    const auto timeout = std::chrono::duration<double>(config_.request_timeout_seconds);
    const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    cli.set_connection_timeout(timeout_us);
    cli.set_read_timeout(timeout_us);
    cli.set_write_timeout(timeout_us);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    RemoteCallRecord record;
    const auto started = std::chrono::steady_clock::now();
    auto finish = [&] {
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::lock_guard lock(log_mutex_);
        log_.push_back(record);
    };

    double backoff = config_.backoff_initial_seconds;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2.0;
        }
        ++record.attempts;
        auto res = cli.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        record.status = res->status;
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            finish();
            throw Error(ErrorCode::RemoteUnavailable, "HTTP " + std::to_string(res->status) + ": " + res->body);
        }

        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::exception& e) {
            finish();
            throw Error(ErrorCode::RemoteProtocolError, std::string("response is not JSON: ") + e.what());
        }
        try {
            if (reply.contains("usage") && reply["usage"].is_object()) {
                const auto& u = reply["usage"];
                if (u.contains("prompt_tokens")) record.prompt_tokens = u["prompt_tokens"].get<long>();
                if (u.contains("completion_tokens")) record.completion_tokens = u["completion_tokens"].get<long>();
            }
            std::string content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            finish();
            return content;
        } catch (const json::exception& e) {
            finish();
            throw Error(ErrorCode::RemoteProtocolError, std::string("unexpected response shape: ") + e.what());
        }
    }
    finish();
    throw Error(ErrorCode::RemoteUnavailable,
                "gave up after " + std::to_string(record.attempts) + " attempts (" + last_error + ")");
}

std::string remote_generate(const RemoteBackendConfig& config, const std::vector<ChatMessage>& messages) {
    RemoteClient client(config);
    return client.generate(messages);
}

RemoteSession::RemoteSession(std::string id, RemoteClient& client) : Session(std::move(id)), client_(client) {}

void RemoteSession::feed(std::string_view text, SourceTag) {
    ensure_open();
    if (!pending_.empty()) pending_.push_back('\n');
    pending_.append(text);
    log(CallKind::Feed, chunker::estimate_tokens(text));
}

std::string RemoteSession::generate(const GenerateRequest& request) {
    ensure_open();
    if (request.mode == GenerateMode::Summary && !request.allow_stop) {
        pending_ += "\n(Read every chunk: finish this summary with <CONTINUE>.)";
    } else if (request.mode == GenerateMode::Answer) {
        pending_ += "\n(Reply with the final answer only.)";
    }
    std::vector<ChatMessage> messages;
    messages.push_back({"system", remote_system_prompt(client_.config())});
    messages.insert(messages.end(), history_.begin(), history_.end());
    messages.push_back({"user", pending_});

    const auto started = std::chrono::steady_clock::now();
    std::optional<std::size_t> max_tokens;
    if (request.max_tokens > 0) max_tokens = request.max_tokens;
    std::string reply = client_.generate(messages, max_tokens);
    advance_clock(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());

    history_.push_back({"user", std::move(pending_)});
    history_.push_back({"assistant", reply});
    pending_.clear();
    log(CallKind::Generate, chunker::estimate_tokens(reply));
    return reply;
}

void RemoteSession::reset() {
    ensure_open();
    history_.clear();
    pending_.clear();
    log(CallKind::Reset, 0);
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : client_(std::move(config)) {}

std::unique_ptr<Session> RemoteBackend::open_session(Task) {
    std::lock_guard lock(id_mutex_);
    return std::make_unique<RemoteSession>("remote-" + std::to_string(next_id_++), client_);
}

}  // namespace smoothread::backends
