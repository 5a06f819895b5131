// SPDX-License-Identifier: Apache-2.0
//
// Local chat-completions stub for the remote backend tests.
#pragma once

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace smoothread::testing {

struct StubReply {
    int status = 200;
    std::string body;
};

inline std::string completion_body(const std::string& content) {
    nlohmann::json j = {{"id", "stub"},
                        {"object", "chat.completion"},
                        {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}},
                        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
    return j.dump();
}

class StubServer {
public:
    // `handler` sees the parsed request body and the 0-based request count.
    using Handler = std::function<StubReply(const nlohmann::json& request, int n)>;

    explicit StubServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post(R"(/v1/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (...) {
                res.status = 400;
                return;
            }
            int n;
            {
                std::lock_guard lock(mutex_);
                requests_.push_back(body);
                n = count_++;
            }
            const StubReply r = handler_(body, n);
            res.status = r.status;
            res.set_content(r.body, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    std::vector<nlohmann::json> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    Handler handler_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<nlohmann::json> requests_;
    int count_ = 0;
};

}  // namespace smoothread::testing
