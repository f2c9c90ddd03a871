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

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"

namespace xmodal::api {

struct ApiError {
    int http_status = 500;
    std::string machine_code;
    std::string human_message;
};

/// The single HTTP status for each error code. Faults in server-side data
/// are 5xx; provider trouble is 502/503.
constexpr int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::EmptyText:
        case ErrorCode::UnsupportedPayload:
        case ErrorCode::MissingJudgment:
        case ErrorCode::EmptyReferences: return 400;
        case ErrorCode::Unauthenticated: return 401;
        case ErrorCode::ReadOnlyGallery: return 403;
        case ErrorCode::UnknownItem:
        case ErrorCode::EmptyGallery:
        case ErrorCode::EmptyCandidateSet:
        case ErrorCode::NoResults:
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownMode:
        case ErrorCode::NotFound: return 404;
        case ErrorCode::CapacityExceeded:
        case ErrorCode::UsernameTaken: return 409;
        case ErrorCode::TooLarge: return 413;
        case ErrorCode::ProviderUnavailable:
        case ErrorCode::ProviderRejected:
        case ErrorCode::MalformedResponse: return 502;
        case ErrorCode::QuotaExceeded:
        case ErrorCode::EmptyPool: return 503;
        case ErrorCode::BadMagic:
        case ErrorCode::UnsupportedVersion:
        case ErrorCode::MalformedHeader:
        case ErrorCode::MissingFile:
        case ErrorCode::ShapeMismatch:
        case ErrorCode::DtypeMismatch:
        case ErrorCode::CorruptManifest:
        case ErrorCode::DimMismatch:
        case ErrorCode::ZeroVector:
        case ErrorCode::EmptyLocalSet:
        case ErrorCode::Internal: return 500;
    }
    return 500;
}

inline ApiError to_api_error(const Error& e) {
    return {http_status(e.code()), std::string(to_string(e.code())), e.message()};
}

inline ApiError api_error(ErrorCode code, std::string message) {
    return {http_status(code), std::string(to_string(code)), std::move(message)};
}

inline nlohmann::json to_json(const ApiError& e) {
    return {{"error", {{"code", e.machine_code}, {"message", e.human_message}}}};
}

}  // namespace xmodal::api
