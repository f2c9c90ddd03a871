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
#include <utility>

#include "xmodal/providers/chat.hpp"
#include "xmodal/providers/http.hpp"

namespace xmodal::providers {

struct ChatClientConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string api_key;
    ChatParams params;
    HttpOptions http;
};

/// Client for an OpenAI-style POST {endpoint}/chat/completions.
class HttpChatClient final : public ChatProvider {
public:
    explicit HttpChatClient(ChatClientConfig cfg)
        : cfg_(std::move(cfg)), transport_(Endpoint::parse(cfg_.endpoint), cfg_.http) {}

    ChatParams default_params() const override { return cfg_.params; }

private:
    std::string do_chat(const std::vector<ChatMessage>& messages, const ChatParams& params) override {
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        const auto r = transport_.post("/chat/completions", chat_request_body(messages, params).dump(),
                                       "application/json", headers);
        if (!r.ok())
            fail(ErrorCode::ProviderRejected, "chat endpoint returned HTTP " + std::to_string(r.status) + ": " + excerpt(r.body));
        return parse_chat_response(parse_json_body(r, "chat endpoint"));
    }

    ChatClientConfig cfg_;
    HttpTransport transport_;
};

}  // namespace xmodal::providers
