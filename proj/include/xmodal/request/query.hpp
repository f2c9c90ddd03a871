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

#include <optional>
#include <string>
#include <string_view>

#include "xmodal/core/error.hpp"
#include "xmodal/core/utf8.hpp"
#include "xmodal/providers/chat.hpp"
#include "xmodal/providers/encoder.hpp"
#include "xmodal/providers/language.hpp"
#include "xmodal/request/prompts.hpp"

namespace xmodal::request {

inline constexpr std::size_t kQueryTokenLimit = 77;

struct NormalizedQuery {
    std::string original_text;
    std::string english_text;
    std::string detected_lang;
    bool was_translated = false;
    bool was_summarized = false;
    std::size_t token_count = 0;
};

struct NormalizeOptions {
    std::size_t token_limit = kQueryTokenLimit;
    std::size_t summary_attempts = 3;  // the first call plus two re-invocations
    std::optional<providers::ChatParams> chat_params;
};

namespace detail {

inline std::string ask(providers::ChatProvider& chat, std::string_view prefix, std::string_view text,
                       const NormalizeOptions& opts) {
    std::vector<providers::ChatMessage> msgs{{providers::Role::User, std::string(prefix) + std::string(text)}};
    const std::string reply = opts.chat_params ? chat.chat(msgs, *opts.chat_params) : chat.chat(msgs);
    const auto trimmed = trim(reply);
    if (trimmed.empty()) fail(ErrorCode::MalformedResponse, "chat provider returned an empty rewrite");
    return std::string(trimmed);
}

}  // namespace detail

/// Detect, translate when not English, then summarize while over the token
/// limit. Provider failures propagate, so untranslated text never reaches
/// the scorer. English text already within the limit makes no provider call.
inline NormalizedQuery normalize_query(std::string_view text, const providers::LanguageDetector& detector,
                                       providers::ChatProvider& chat, const providers::Encoder& tokenizer,
                                       const NormalizeOptions& opts = {}) {
    const auto trimmed = trim(text);
    if (trimmed.empty()) fail(ErrorCode::EmptyText, "query is empty");

    NormalizedQuery q;
    q.original_text = std::string(text);
    q.detected_lang = detector.detect(trimmed).lang_code;
    q.english_text = std::string(trimmed);
    if (q.detected_lang != "en") {
        q.english_text = detail::ask(chat, prompts::kTranslate, trimmed, opts);
        q.was_translated = true;
    }

    q.token_count = tokenizer.count_tokens(q.english_text);
    for (std::size_t attempt = 0; q.token_count > opts.token_limit && attempt < opts.summary_attempts; ++attempt) {
        q.english_text = detail::ask(chat, prompts::kSummarize, q.english_text, opts);
        q.was_summarized = true;
        q.token_count = tokenizer.count_tokens(q.english_text);
    }
    if (q.token_count > opts.token_limit) {
        q.english_text = tokenizer.truncate_tokens(q.english_text, opts.token_limit);
        q.token_count = tokenizer.count_tokens(q.english_text);
    }
    return q;
}

}  // namespace xmodal::request
