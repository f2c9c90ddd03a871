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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"

namespace xmodal::providers {

enum class Role { System, User, Assistant };

constexpr std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

inline Role parse_role(std::string_view s) {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    fail(ErrorCode::InvalidArgument, "unknown chat role '" + std::string(s) + "'");
}

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatParams {
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
};

struct WebSearchResult {
    std::string image_uri;
    std::optional<std::string> thumbnail_bytes;
    std::string title;
    std::size_t source_rank = 0;  // 1-based

    friend bool operator==(const WebSearchResult&, const WebSearchResult&) = default;
};

inline constexpr std::size_t kDefaultWebResults = 40;
inline constexpr std::size_t kMaxWebResults = 100;

struct DetectedLanguage {
    std::string lang_code;  // ISO-639-1, or "und"
    double confidence = 0.0;
};

/// Text or encoded image bytes handed to an encoder.
struct Payload {
    enum class Kind { Text, Image };
    Kind kind = Kind::Text;
    std::string data;

    static Payload text(std::string s) { return {Kind::Text, std::move(s)}; }
    static Payload image(std::string bytes) { return {Kind::Image, std::move(bytes)}; }
};

enum class ImageFormat { Unknown, Jpeg, Png };

/// Sniffs the leading signature bytes.
inline ImageFormat sniff_image(std::string_view bytes) {
    if (bytes.size() >= 3 && bytes.substr(0, 3) == std::string_view("\xFF\xD8\xFF", 3)) return ImageFormat::Jpeg;
    if (bytes.size() >= 8 && bytes.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8)) return ImageFormat::Png;
    return ImageFormat::Unknown;
}

inline std::string_view mime_type(ImageFormat f) {
    switch (f) {
        case ImageFormat::Jpeg: return "image/jpeg";
        case ImageFormat::Png: return "image/png";
        case ImageFormat::Unknown: break;
    }
    return "application/octet-stream";
}

/// Throws UnsupportedPayload unless the payload is nonempty text or a JPEG/PNG.
inline void validate_payload(const Payload& p) {
    if (p.kind == Payload::Kind::Text) {
        if (p.data.find_first_not_of(" \t\r\n") == std::string::npos) fail(ErrorCode::EmptyText, "empty text payload");
        return;
    }
    if (p.data.empty()) fail(ErrorCode::UnsupportedPayload, "image payload is empty");
    if (sniff_image(p.data) == ImageFormat::Unknown)
        fail(ErrorCode::UnsupportedPayload, "image payload is neither JPEG nor PNG");
}

}  // namespace xmodal::providers
