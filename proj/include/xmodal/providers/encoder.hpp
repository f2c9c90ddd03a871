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

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

#include "xmodal/core/error.hpp"
#include "xmodal/core/random.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/providers/types.hpp"

namespace xmodal::providers {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Number of maximal runs of non-whitespace bytes.
inline std::size_t count_whitespace_tokens(std::string_view text) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

/// The first `limit` whitespace tokens joined by single spaces.
inline std::string truncate_whitespace_tokens(std::string_view text, std::size_t limit) {
    std::string out;
    std::size_t n = 0, i = 0;
    while (i < text.size() && n < limit) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (!out.empty()) out.push_back(' ');
        out.append(text.substr(start, i - start));
        ++n;
    }
    return out;
}

/// Encoder contract. The tokenizer belongs to the encoder because token
/// limits are the encoder's context length.
class Encoder {
public:
    virtual ~Encoder() = default;

    virtual Dims dims() const = 0;

    /// Validates the payload, encodes it and checks the result against dims().
    Representation encode(const Payload& payload) {
        validate_payload(payload);
        Representation r = do_encode(payload);
        if (r.local_dim == 0 || r.locals.size() % r.local_dim != 0 || !(r.dims() == dims()))
            fail(ErrorCode::MalformedResponse, "encoder returned a representation of the wrong shape");
        if (!r.all_finite()) fail(ErrorCode::MalformedResponse, "encoder returned non-finite values");
        return r;
    }

    Representation encode_text(std::string text) { return encode(Payload::text(std::move(text))); }
    Representation encode_image(std::string bytes) { return encode(Payload::image(std::move(bytes))); }

    virtual std::size_t count_tokens(std::string_view text) const { return count_whitespace_tokens(text); }
    virtual std::string truncate_tokens(std::string_view text, std::size_t limit) const {
        return truncate_whitespace_tokens(text, limit);
    }

private:
    virtual Representation do_encode(const Payload& payload) = 0;
};

/// Pure function of (seed, payload kind, payload bytes): a unit-norm global
/// vector and uniform locals, unless the payload was planted.
class MockEncoder final : public Encoder {
public:
    explicit MockEncoder(Dims dims, std::uint64_t seed = 0) : dims_(dims), seed_(seed) {}

    Dims dims() const override { return dims_; }

    /// Every later encode of this payload returns `rep`.
    void plant(const Payload& payload, Representation rep) {
        check_dims(rep, dims_);
        std::lock_guard lock(mu_);
        planted_[key(payload)] = std::move(rep);
    }

    Representation generated(const Payload& payload) const {
        SplitMix64 rng(fnv1a(payload.data, fnv1a(std::string_view(payload.kind == Payload::Kind::Text ? "t" : "i"))) ^ seed_);
        Representation r;
        r.global.resize(dims_.global);
        double sq = 0;
        for (auto& v : r.global) {
            v = rng.uniform();
            sq += static_cast<double>(v) * v;
        }
        if (sq == 0) r.global[0] = 1.0f, sq = 1;
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& v : r.global) v = static_cast<float>(v * inv);
        r.local_dim = dims_.local;
        r.locals.resize(dims_.local_values());
        for (auto& v : r.locals) v = rng.uniform();
        return r;
    }

    std::size_t encode_count() const {
        std::lock_guard lock(mu_);
        return encodes_;
    }

private:
    static std::string key(const Payload& p) { return (p.kind == Payload::Kind::Text ? "t:" : "i:") + p.data; }

    Representation do_encode(const Payload& payload) override {
        {
            std::lock_guard lock(mu_);
            ++encodes_;
            if (const auto it = planted_.find(key(payload)); it != planted_.end()) return it->second;
        }
        return generated(payload);
    }

    Dims dims_;
    std::uint64_t seed_;
    mutable std::mutex mu_;
    std::map<std::string, Representation> planted_;
    std::size_t encodes_ = 0;
};

}  // namespace xmodal::providers
