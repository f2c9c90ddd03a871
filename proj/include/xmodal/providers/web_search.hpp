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

#include <algorithm>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/utf8.hpp"
#include "xmodal/providers/types.hpp"

namespace xmodal::providers {

/// Web image search contract: at most `count` results, source_rank
/// ascending and unique.
class WebSearchProvider {
public:
    virtual ~WebSearchProvider() = default;

    std::vector<WebSearchResult> search(std::string_view query, std::size_t count = kDefaultWebResults) {
        if (is_blank(query)) fail(ErrorCode::EmptyText, "web search query is empty");
        if (count < 1 || count > kMaxWebResults)
            fail(ErrorCode::InvalidArgument, "result count must lie in [1, 100], got " + std::to_string(count));
        auto results = do_search(query, count);
        std::stable_sort(results.begin(), results.end(),
                         [](const auto& a, const auto& b) { return a.source_rank < b.source_rank; });
        if (results.size() > count) results.resize(count);
        std::set<std::size_t> ranks;
        for (const auto& r : results)
            if (r.source_rank == 0 || !ranks.insert(r.source_rank).second)
                fail(ErrorCode::MalformedResponse, "search results carry a missing or repeated source rank");
        return results;
    }

private:
    virtual std::vector<WebSearchResult> do_search(std::string_view query, std::size_t count) = 0;
};

/// Serves a fixed result list for every query.
class MockWebSearch final : public WebSearchProvider {
public:
    MockWebSearch() = default;
    explicit MockWebSearch(std::vector<WebSearchResult> fixtures) : fixtures_(std::move(fixtures)) {}

    void set_results(std::vector<WebSearchResult> fixtures) {
        std::lock_guard lock(mu_);
        fixtures_ = std::move(fixtures);
    }
    void set_quota_exceeded(bool on) {
        std::lock_guard lock(mu_);
        quota_ = on;
    }
    void set_unavailable(bool on) {
        std::lock_guard lock(mu_);
        unavailable_ = on;
    }

    struct Request {
        std::string query;
        std::size_t count;
    };
    std::vector<Request> requests() const {
        std::lock_guard lock(mu_);
        return requests_;
    }

private:
    std::vector<WebSearchResult> do_search(std::string_view query, std::size_t count) override {
        std::lock_guard lock(mu_);
        requests_.push_back({std::string(query), count});
        if (unavailable_) fail(ErrorCode::ProviderUnavailable, "mock search provider is down");
        if (quota_) fail(ErrorCode::QuotaExceeded, "mock search quota exhausted");
        auto out = fixtures_;
        if (out.size() > count) out.resize(count);
        return out;
    }

    mutable std::mutex mu_;
    std::vector<WebSearchResult> fixtures_;
    bool quota_ = false;
    bool unavailable_ = false;
    std::vector<Request> requests_;
};

}  // namespace xmodal::providers
