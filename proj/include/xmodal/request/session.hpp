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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/providers/types.hpp"

namespace xmodal::request {

using providers::ChatMessage;
using providers::Role;

/// A conversation: alternating user and assistant turns (the system message
/// is rebuilt for every request) plus the image descriptions attached to
/// each user turn.
struct ChatSession {
    std::string id;
    std::string owner;  // empty for anonymous sessions
    std::vector<ChatMessage> turns;
    std::vector<std::vector<std::string>> attached_descriptions;  // one entry per user turn

    std::size_t image_count() const {
        std::size_t n = 0;
        for (const auto& d : attached_descriptions) n += d.size();
        return n;
    }

    friend bool operator==(const ChatSession&, const ChatSession&) = default;
};

inline nlohmann::json to_json(const ChatSession& s) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& m : s.turns) turns.push_back({{"role", providers::to_string(m.role)}, {"content", m.content}});
    return {{"id", s.id}, {"owner", s.owner}, {"turns", turns}, {"attached_descriptions", s.attached_descriptions}};
}

inline ChatSession session_from_json(const nlohmann::json& j) {
    try {
        ChatSession s;
        s.id = j.at("id").get<std::string>();
        s.owner = j.at("owner").get<std::string>();
        for (const auto& t : j.at("turns"))
            s.turns.push_back({providers::parse_role(t.at("role").get<std::string>()), t.at("content").get<std::string>()});
        s.attached_descriptions = j.at("attached_descriptions").get<std::vector<std::vector<std::string>>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Internal, std::string("stored session is unreadable: ") + e.what());
    }
}

/// 128 bits from the system entropy source as 32 lowercase hex digits.
/// Session ids double as access keys for anonymous chats.
inline std::string random_hex_id() {
    static thread_local std::random_device device;
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (int word = 0; word < 4; ++word) {
        const std::uint32_t bits = device();
        for (int i = 0; i < 8; ++i) out.push_back(digits[(bits >> (4 * i)) & 0xf]);
    }
    return out;
}

class SessionStore {
public:
    virtual ~SessionStore() = default;
    virtual std::optional<ChatSession> load(const std::string& id) const = 0;
    virtual void save(const ChatSession& session) = 0;
};

class InMemorySessionStore final : public SessionStore {
public:
    std::optional<ChatSession> load(const std::string& id) const override {
        std::lock_guard lock(mu_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) return std::nullopt;
        return it->second;
    }

    void save(const ChatSession& session) override {
        std::lock_guard lock(mu_);
        sessions_[session.id] = session;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, ChatSession> sessions_;
};

}  // namespace xmodal::request
