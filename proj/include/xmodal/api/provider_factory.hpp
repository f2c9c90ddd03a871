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

#include <memory>

#include "xmodal/api/config.hpp"
#include "xmodal/api/service.hpp"
#include "xmodal/providers/chat_http.hpp"
#include "xmodal/providers/encoder_http.hpp"
#include "xmodal/providers/web_search_http.hpp"

namespace xmodal::api {

/// Owns the providers a service runs on.
struct ProviderBundle {
    std::unique_ptr<providers::ChatProvider> chat;
    std::unique_ptr<providers::Encoder> encoder;
    std::unique_ptr<providers::WebSearchProvider> search;  // null without search credentials

    ServiceProviders view() const { return {chat.get(), encoder.get(), search.get(), nullptr}; }
};

/// "mock" gives offline providers: an echoing chat model, a seeded
/// content-hashed encoder and no web search.
inline ProviderBundle make_providers(const ServiceConfig& cfg) {
    const auto& p = cfg.providers;
    ProviderBundle b;
    if (p.kind == "mock") {
        b.chat = std::make_unique<providers::MockChatProvider>();
        b.encoder = std::make_unique<providers::MockEncoder>(cfg.dims);
        return b;
    }
    if (p.kind != "http") fail(ErrorCode::InvalidArgument, "unknown provider kind '" + p.kind + "'");

    b.chat = std::make_unique<providers::HttpChatClient>(
        providers::ChatClientConfig{p.chat_endpoint, p.llm_api_key, {p.chat_model, p.chat_temperature}, p.http});
    b.encoder = std::make_unique<providers::HttpEncoderClient>(
        providers::EncoderClientConfig{p.encoder_endpoint, cfg.dims, p.http});
    if (!p.search_api_key.empty() && !p.search_engine_id.empty())
        b.search = std::make_unique<providers::HttpWebSearchClient>(providers::WebSearchClientConfig{
            p.search_endpoint, p.search_api_key, p.search_engine_id, true, p.http});
    return b;
}

}  // namespace xmodal::api
