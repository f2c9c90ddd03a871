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

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xmodal {

/// Closed set of failure kinds raised anywhere in the library. The HTTP
/// layer maps each one to exactly one (status, machine code) pair.
enum class ErrorCode {
    // tensor files and stores
    BadMagic,
    UnsupportedVersion,
    MalformedHeader,
    MissingFile,
    ShapeMismatch,
    DtypeMismatch,
    CorruptManifest,
    UnknownItem,
    // galleries
    CapacityExceeded,
    ReadOnlyGallery,
    DimMismatch,
    // scoring
    ZeroVector,
    EmptyLocalSet,
    EmptyCandidateSet,
    InvalidArgument,
    // providers
    EmptyText,
    ProviderUnavailable,
    ProviderRejected,
    MalformedResponse,
    QuotaExceeded,
    UnsupportedPayload,
    // orchestration
    EmptyGallery,
    NoResults,
    EmptyPool,
    UnknownSession,
    // evaluation
    MissingJudgment,
    EmptyReferences,
    // service boundary
    Unauthenticated,
    UsernameTaken,
    UnknownMode,
    TooLarge,
    NotFound,
    Internal,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::BadMagic,          ErrorCode::UnsupportedVersion,
    ErrorCode::MalformedHeader,   ErrorCode::MissingFile,
    ErrorCode::ShapeMismatch,     ErrorCode::DtypeMismatch,
    ErrorCode::CorruptManifest,   ErrorCode::UnknownItem,
    ErrorCode::CapacityExceeded,  ErrorCode::ReadOnlyGallery,
    ErrorCode::DimMismatch,       ErrorCode::ZeroVector,
    ErrorCode::EmptyLocalSet,     ErrorCode::EmptyCandidateSet,
    ErrorCode::InvalidArgument,   ErrorCode::EmptyText,
    ErrorCode::ProviderUnavailable, ErrorCode::ProviderRejected,
    ErrorCode::MalformedResponse, ErrorCode::QuotaExceeded,
    ErrorCode::UnsupportedPayload, ErrorCode::EmptyGallery,
    ErrorCode::NoResults,         ErrorCode::EmptyPool,
    ErrorCode::UnknownSession,    ErrorCode::MissingJudgment,
    ErrorCode::EmptyReferences,   ErrorCode::Unauthenticated,
    ErrorCode::UsernameTaken,     ErrorCode::UnknownMode,
    ErrorCode::TooLarge,          ErrorCode::NotFound,
    ErrorCode::Internal,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadMagic: return "bad_magic";
        case ErrorCode::UnsupportedVersion: return "unsupported_version";
        case ErrorCode::MalformedHeader: return "malformed_header";
        case ErrorCode::MissingFile: return "missing_file";
        case ErrorCode::ShapeMismatch: return "shape_mismatch";
        case ErrorCode::DtypeMismatch: return "dtype_mismatch";
        case ErrorCode::CorruptManifest: return "corrupt_manifest";
        case ErrorCode::UnknownItem: return "unknown_item";
        case ErrorCode::CapacityExceeded: return "capacity_exceeded";
        case ErrorCode::ReadOnlyGallery: return "read_only_gallery";
        case ErrorCode::DimMismatch: return "dim_mismatch";
        case ErrorCode::ZeroVector: return "zero_vector";
        case ErrorCode::EmptyLocalSet: return "empty_local_set";
        case ErrorCode::EmptyCandidateSet: return "empty_candidate_set";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::EmptyText: return "empty_text";
        case ErrorCode::ProviderUnavailable: return "provider_unavailable";
        case ErrorCode::ProviderRejected: return "provider_rejected";
        case ErrorCode::MalformedResponse: return "malformed_response";
        case ErrorCode::QuotaExceeded: return "quota_exceeded";
        case ErrorCode::UnsupportedPayload: return "unsupported_payload";
        case ErrorCode::EmptyGallery: return "empty_gallery";
        case ErrorCode::NoResults: return "no_results";
        case ErrorCode::EmptyPool: return "empty_pool";
        case ErrorCode::UnknownSession: return "unknown_session";
        case ErrorCode::MissingJudgment: return "missing_judgment";
        case ErrorCode::EmptyReferences: return "empty_references";
        case ErrorCode::Unauthenticated: return "unauthenticated";
        case ErrorCode::UsernameTaken: return "username_taken";
        case ErrorCode::UnknownMode: return "unknown_mode";
        case ErrorCode::TooLarge: return "too_large";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace xmodal
