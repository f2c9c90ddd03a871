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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/core/utf8.hpp"
#include "xmodal/request/prompts.hpp"
#include "xmodal/request/session.hpp"

namespace xmodal::request {

inline constexpr std::size_t kHistoryWindow = 20;

/// Line breaks inside a description would split its "Image N:" line.
inline std::string single_line(std::string_view s) {
    std::string out(trim(s));
    for (auto& c : out)
        if (c == '\n' || c == '\r') c = ' ';
    return out;
}

/// System message, the most recent `history_window` turns of history, then
/// the new user message. New descriptions are numbered after every image
/// already attached to the session.
inline std::vector<ChatMessage> build_chat_prompt(const ChatSession& session, std::string_view user_text,
                                                  const std::vector<std::string>& new_descriptions,
                                                  std::size_t history_window = kHistoryWindow) {
    if (is_blank(user_text)) fail(ErrorCode::EmptyText, "chat message is empty");

    const std::size_t prior_images = session.image_count();
    std::string system(prompts::kSystem);
    if (prior_images > 0 || !new_descriptions.empty()) {
        system += ' ';
        system += prompts::kImageInstruction;
    }

    std::vector<ChatMessage> out;
    out.push_back({Role::System, std::move(system)});

    std::size_t first = session.turns.size() > history_window ? session.turns.size() - history_window : 0;
    if (first < session.turns.size() && session.turns[first].role == Role::Assistant) ++first;
    out.insert(out.end(), session.turns.begin() + static_cast<std::ptrdiff_t>(first), session.turns.end());

    std::string content;
    for (std::size_t i = 0; i < new_descriptions.size(); ++i) {
        content += prompts::kImageLinePrefix;
        content += std::to_string(prior_images + i + 1);
        content += ": ";
        content += single_line(new_descriptions[i]);
        content += '\n';
    }
    if (!content.empty()) content += '\n';
    content += trim(user_text);
    out.push_back({Role::User, std::move(content)});
    return out;
}

/// Byte-stable form of a message list: a JSON array of {role, content},
/// two-space indented, UTF-8 unescaped, newline terminated.
inline std::string serialize_prompt(const std::vector<ChatMessage>& messages) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        nlohmann::ordered_json msg;
        msg["role"] = providers::to_string(m.role);
        msg["content"] = m.content;
        arr.push_back(std::move(msg));
    }
    return arr.dump(2) + "\n";
}

}  // namespace xmodal::request
