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

#include <httplib.h>

#include <chrono>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"

namespace xmodal::providers {

using namespace std::chrono_literals;

struct HttpOptions {
    std::chrono::milliseconds timeout = 30s;
    int retries = 2;
    std::chrono::milliseconds backoff = 250ms;  // doubled after each failed attempt
    double max_requests_per_second = 0.0;       // 0: unlimited

    static HttpOptions from_json(const nlohmann::json& j) {
        HttpOptions o;
        if (j.contains("timeout_ms")) o.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
        if (j.contains("retries")) o.retries = j.at("retries").get<int>();
        if (j.contains("backoff_ms")) o.backoff = std::chrono::milliseconds(j.at("backoff_ms").get<long>());
        if (j.contains("max_rps")) o.max_requests_per_second = j.at("max_rps").get<double>();
        if (o.retries < 0 || o.timeout.count() <= 0 || o.backoff.count() < 0 || o.max_requests_per_second < 0)
            fail(ErrorCode::InvalidArgument, "http options out of range");
        return o;
    }
};

/// "https://host:port/base" split into the part httplib connects to and the
/// path prefix every request is issued under.
struct Endpoint {
    std::string origin;     // scheme://host[:port]
    std::string base_path;  // "" or "/v1", never a trailing slash

    static Endpoint parse(std::string_view url) {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string_view::npos) fail(ErrorCode::InvalidArgument, "endpoint '" + std::string(url) + "' has no scheme");
        const auto scheme = url.substr(0, scheme_end);
        if (scheme != "http" && scheme != "https")
            fail(ErrorCode::InvalidArgument, "endpoint scheme must be http or https");
        const auto path_start = url.find('/', scheme_end + 3);
        Endpoint e;
        e.origin = std::string(url.substr(0, path_start));
        if (e.origin.size() == scheme_end + 3) fail(ErrorCode::InvalidArgument, "endpoint has no host");
        if (path_start != std::string_view::npos) {
            e.base_path = std::string(url.substr(path_start));
            while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
        }
        return e;
    }

    std::string path(std::string_view suffix) const { return base_path + std::string(suffix); }
};

/// Spaces request starts at least 1/rate apart. Callers reserve a slot under
/// the lock and sleep outside it.
class RateLimiter {
public:
    explicit RateLimiter(double per_second) {
        if (per_second > 0)
            interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / per_second));
    }

    void acquire() {
        if (interval_ == Clock::duration::zero()) return;
        Clock::time_point slot;
        {
            std::lock_guard lock(mu_);
            const auto now = Clock::now();
            slot = std::max(now, next_);
            next_ = slot + interval_;
        }
        std::this_thread::sleep_until(slot);
    }

private:
    using Clock = std::chrono::steady_clock;
    std::mutex mu_;
    Clock::duration interval_{};
    Clock::time_point next_{};
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::string content_type;

    bool ok() const { return status >= 200 && status < 300; }
};

/// Minimal reentrant HTTP client. Network failures and 502/503/504 are
/// retried with exponential backoff; once retries run out the call fails
/// with ProviderUnavailable. Any other status is returned to the caller.
class HttpTransport {
public:
    HttpTransport(Endpoint endpoint, HttpOptions options)
        : endpoint_(std::move(endpoint)), options_(options), limiter_(options.max_requests_per_second) {}

    const Endpoint& endpoint() const { return endpoint_; }
    const HttpOptions& options() const { return options_; }

    HttpResponse post(std::string_view path, const std::string& body, const std::string& content_type,
                      const httplib::Headers& headers = {}) {
        return with_retries([&](httplib::Client& c) { return c.Post(endpoint_.path(path), headers, body, content_type); });
    }

    HttpResponse get(std::string_view path, const httplib::Params& params = {}, const httplib::Headers& headers = {}) {
        return with_retries([&](httplib::Client& c) { return c.Get(endpoint_.path(path), params, headers); });
    }

    /// GET of an absolute URL on any host, with the same timeouts and policy.
    static HttpResponse fetch(std::string_view url, const HttpOptions& options) {
        const auto e = Endpoint::parse(url);
        HttpTransport t(Endpoint{e.origin, ""}, options);
        return t.get(e.base_path.empty() ? "/" : e.base_path);
    }

private:
    template <typename Send>
    HttpResponse with_retries(Send&& send) {
        std::chrono::milliseconds delay = options_.backoff;
        std::string last_error;
        for (int attempt = 0; attempt <= options_.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(delay);
                delay *= 2;
            }
            limiter_.acquire();
            httplib::Client client(endpoint_.origin);
            const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
            const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
            client.set_connection_timeout(secs.count(), usecs.count());
            client.set_read_timeout(secs.count(), usecs.count());
            client.set_write_timeout(secs.count(), usecs.count());
            client.set_follow_location(true);

            auto result = send(client);
            if (!result) {
                last_error = httplib::to_string(result.error());
                continue;
            }
            const int status = result->status;
            if (status == 502 || status == 503 || status == 504) {
                last_error = "HTTP " + std::to_string(status);
                continue;
            }
            return {status, std::move(result->body), result->get_header_value("Content-Type")};
        }
        fail(ErrorCode::ProviderUnavailable,
             endpoint_.origin + " unavailable after " + std::to_string(options_.retries + 1) + " attempts: " + last_error);
    }

    Endpoint endpoint_;
    HttpOptions options_;
    RateLimiter limiter_;
};

/// The first `limit` bytes of a response body, for error messages.
inline std::string excerpt(std::string_view body, std::size_t limit = 200) {
    return std::string(body.substr(0, limit));
}

inline nlohmann::json parse_json_body(const HttpResponse& r, std::string_view what) {
    auto j = nlohmann::json::parse(r.body, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::MalformedResponse, std::string(what) + " returned invalid JSON: " + excerpt(r.body));
    return j;
}

/// String at `pointer`, or empty when absent or of another type.
inline std::string string_at(const nlohmann::json& j, const char* pointer) {
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) return {};
    const auto& v = j.at(ptr);
    return v.is_string() ? v.get<std::string>() : std::string();
}

}  // namespace xmodal::providers
