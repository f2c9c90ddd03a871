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

#include <string_view>

// Frozen prompt wording. Any change to these strings changes request
// bytes sent to the chat provider, so bump kPromptTemplateVersion and
// regenerate the golden prompt files together.

namespace xmodal::request::prompts {

inline constexpr int kPromptTemplateVersion = 1;

/// Followed directly by the user's query.
inline constexpr std::string_view kTranslate =
    "Translate the following text to English, provide the result directly without explanations: ";

/// Followed directly by the over-long English query.
inline constexpr std::string_view kSummarize =
    "Summarize the following text in English in fewer than 60 words, provide the result directly without "
    "explanations: ";

inline constexpr std::string_view kSystem =
    "You are a helpful assistant in an image search engine. Reply in the language of the user's latest message.";

/// Appended to kSystem (after one space) once any image has been shared.
inline constexpr std::string_view kImageInstruction =
    "The user's images are given as lines of the form \"Image N: description\" before the question. Pretend "
    "that you can view these images yourself and never mention that you were given descriptions. If the "
    "question is unrelated to the images, do not discuss the images in your response.";

/// Line prefix for each attached image; the 1-based number follows.
inline constexpr std::string_view kImageLinePrefix = "Image ";

}  // namespace xmodal::request::prompts
