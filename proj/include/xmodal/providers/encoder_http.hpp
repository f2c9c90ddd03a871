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

#include "xmodal/providers/encoder.hpp"
#include "xmodal/providers/http.hpp"

namespace xmodal::providers {

struct EncoderClientConfig {
    std::string endpoint = "http://127.0.0.1:8100";
    Dims dims = kDefaultDims;
    HttpOptions http;
};

/// Parses {"global": [...], "locals": [[...], ...]}.
inline Representation parse_encoder_response(const nlohmann::json& j) {
    Representation r;
    try {
        for (const auto& v : j.at("global")) r.global.push_back(v.get<float>());
        for (const auto& row : j.at("locals")) {
            if (!row.is_array()) fail(ErrorCode::MalformedResponse, "locals row is not an array");
            if (r.local_dim == 0) r.local_dim = row.size();
            if (row.size() != r.local_dim) fail(ErrorCode::MalformedResponse, "locals rows differ in length");
            for (const auto& v : row) r.locals.push_back(v.get<float>());
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedResponse, std::string("encoder response: ") + e.what());
    }
    return r;
}

/// Client for an encoder sidecar: POST {endpoint}/encode/text with
/// {"text": ...}, POST {endpoint}/encode/image with the raw image bytes.
/// Tokens are counted locally by whitespace.
class HttpEncoderClient final : public Encoder {
public:
    explicit HttpEncoderClient(EncoderClientConfig cfg)
        : cfg_(std::move(cfg)), transport_(Endpoint::parse(cfg_.endpoint), cfg_.http) {}

    Dims dims() const override { return cfg_.dims; }

private:
    Representation do_encode(const Payload& payload) override {
        HttpResponse r;
        if (payload.kind == Payload::Kind::Text) {
            r = transport_.post("/encode/text", nlohmann::json{{"text", payload.data}}.dump(), "application/json");
        } else {
            r = transport_.post("/encode/image", payload.data, std::string(mime_type(sniff_image(payload.data))));
        }
        if (r.status == 415 || r.status == 422)
            fail(ErrorCode::UnsupportedPayload, "encoder refused the payload: " + excerpt(r.body));
        if (!r.ok())
            fail(ErrorCode::ProviderRejected, "encoder returned HTTP " + std::to_string(r.status) + ": " + excerpt(r.body));
        return parse_encoder_response(parse_json_body(r, "encoder"));
    }

    EncoderClientConfig cfg_;
    HttpTransport transport_;
};

}  // namespace xmodal::providers
