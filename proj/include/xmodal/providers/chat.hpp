// Copyright 2026 The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/providers/types.hpp"

namespace xmodal::providers {

/// Chat-completion contract. Callers go through chat(), which checks the
/// message list before any provider sees it.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    std::string chat(const std::vector<ChatMessage>& messages) { return chat(messages, default_params()); }

    std::string chat(const std::vector<ChatMessage>& messages, const ChatParams& params) {
        if (messages.empty()) fail(ErrorCode::InvalidArgument, "chat needs at least one message");
        if (messages.back().role != Role::User) fail(ErrorCode::InvalidArgument, "last chat message must come from the user");
        return do_chat(messages, params);
    }

    virtual ChatParams default_params() const { return {}; }

private:
    virtual std::string do_chat(const std::vector<ChatMessage>& messages, const ChatParams& params) = 0;
};

/// Request body of the chat-completions wire contract. Key order is fixed
/// so serialized bodies can be compared byte for byte.
inline nlohmann::ordered_json chat_request_body(const std::vector<ChatMessage>& messages, const ChatParams& params) {
    nlohmann::ordered_json body;
    body["model"] = params.model;
    body["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        nlohmann::ordered_json msg;
        msg["role"] = to_string(m.role);
        msg["content"] = m.content;
        body["messages"].push_back(std::move(msg));
    }
    body["temperature"] = params.temperature;
    return body;
}

/// Extracts choices[0].message.content from a chat-completions response.
inline std::string parse_chat_response(const nlohmann::json& j) {
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) fail(ErrorCode::MalformedResponse, "message content is not a string");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedResponse, std::string("chat response lacks choices[0].message.content: ") + e.what());
    }
}

/// Deterministic stand-in. Replies come from the canned table keyed by the
/// last user message, then from the responder, which by default echoes the
/// whole prompt. Every call is logged, including failed ones.
class MockChatProvider final : public ChatProvider {
public:
    using Responder = std::function<std::string(const std::vector<ChatMessage>&)>;

    static std::string echo(const std::vector<ChatMessage>& messages) {
        std::string out;
        for (const auto& m : messages) {
            out += to_string(m.role);
            out += ": ";
            out += m.content;
            out += '\n';
        }
        return out;
    }

    MockChatProvider() : responder_(&MockChatProvider::echo) {}

    void set_reply(std::string user_content, std::string reply) {
        std::lock_guard lock(mu_);
        canned_[std::move(user_content)] = std::move(reply);
    }

    void set_responder(Responder r) {
        std::lock_guard lock(mu_);
        responder_ = std::move(r);
    }

    /// The next `count` calls fail with `code`; count < 0 fails every call.
    void fail_calls(ErrorCode code, int count = -1) {
        std::lock_guard lock(mu_);
        failure_ = code;
        failures_left_ = count;
    }

    void clear_failure() {
        std::lock_guard lock(mu_);
        failure_.reset();
    }

    std::vector<std::vector<ChatMessage>> calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }

    std::size_t call_count() const {
        std::lock_guard lock(mu_);
        return calls_.size();
    }

    void reset_calls() {
        std::lock_guard lock(mu_);
        calls_.clear();
    }

private:
    std::string do_chat(const std::vector<ChatMessage>& messages, const ChatParams&) override {
        std::lock_guard lock(mu_);
        calls_.push_back(messages);
        if (failure_ && failures_left_ != 0) {
            if (failures_left_ > 0) --failures_left_;
            fail(*failure_, "mock chat provider failure");
        }
        if (const auto it = canned_.find(messages.back().content); it != canned_.end()) return it->second;
        return responder_(messages);
    }

    mutable std::mutex mu_;
    std::map<std::string, std::string> canned_;
    Responder responder_;
    std::optional<ErrorCode> failure_;
    int failures_left_ = 0;
    std::vector<std::vector<ChatMessage>> calls_;
};

}  // namespace xmodal::providers
