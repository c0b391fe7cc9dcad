// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

// Replays recorded chat-completion responses from a local HTTP server.
#pragma once

#include <atomic>
#include <fstream>
#include <map>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

class MockEndpoint {
public:
    explicit MockEndpoint(const std::string& recording) {
        std::ifstream in(recording);
        const auto j = nlohmann::json::parse(in);
        for (const auto& e : j) replies_[e["user"].get<std::string>()] = {e["status"].get<int>(), e["body"].dump()};

        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = ++hits_;
            last_auth_ = req.get_header_value("Authorization");
            if (n <= fail_first_) {
                res.status = 503;
                return;
            }
            const auto body = nlohmann::json::parse(req.body, nullptr, false);
            std::string user;
            if (!body.is_discarded() && body.contains("messages")) {
                for (const auto& m : body["messages"])
                    if (m.value("role", "") == "user") user = m.value("content", "");
                last_system_ = body["messages"][0].value("content", "");
            }
            auto it = replies_.find(user);
            if (it == replies_.end()) {
                res.status = 404;
                return;
            }
            res.status = it->second.first;
            res.set_content(it->second.second, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockEndpoint() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
    int hits() const { return hits_; }
    void fail_first(int n) { fail_first_ = n; }
    std::string last_auth() const { return last_auth_; }
    std::string last_system() const { return last_system_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
    std::atomic<int> fail_first_{0};
    std::map<std::string, std::pair<int, std::string>> replies_;
    std::string last_auth_;
    std::string last_system_;
};
