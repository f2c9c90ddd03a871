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

#include "xmodal/providers/http.hpp"
#include "xmodal/providers/web_search.hpp"

namespace xmodal::providers {

struct WebSearchClientConfig {
    std::string endpoint = "https://www.googleapis.com/customsearch/v1";
    std::string api_key;
    std::string engine_id;
    bool fetch_thumbnails = true;
    HttpOptions http;
};

/// Custom-search style image search: GET {endpoint}?q=&key=&cx=&searchType=image&num=&start=
/// returning {items: [{link, title, image: {thumbnailLink}}]}. Pages of at
/// most 10 are requested until `count` results arrive or a page comes back
/// short. Thumbnails that cannot be fetched are left empty.
class HttpWebSearchClient final : public WebSearchProvider {
public:
    static constexpr std::size_t kPageSize = 10;

    explicit HttpWebSearchClient(WebSearchClientConfig cfg)
        : cfg_(std::move(cfg)), transport_(Endpoint::parse(cfg_.endpoint), cfg_.http) {}

private:
    static bool is_quota_error(const HttpResponse& r) {
        if (r.status == 429) return true;
        if (r.status != 403) return false;
        const auto j = nlohmann::json::parse(r.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return false;
        const nlohmann::json::json_pointer ptr("/error/errors");
        if (!j.contains(ptr) || !j.at(ptr).is_array()) return false;
        for (const auto& e : j.at(ptr)) {
            const std::string reason = string_at(e, "/reason");
            if (reason.find("Exceeded") != std::string::npos || reason.find("quota") != std::string::npos) return true;
        }
        return false;
    }

    std::vector<WebSearchResult> do_search(std::string_view query, std::size_t count) override {
        std::vector<WebSearchResult> out;
        while (out.size() < count) {
            const std::size_t want = std::min(kPageSize, count - out.size());
            httplib::Params params{{"q", std::string(query)},
                                   {"searchType", "image"},
                                   {"num", std::to_string(want)},
                                   {"start", std::to_string(out.size() + 1)}};
            if (!cfg_.api_key.empty()) params.emplace("key", cfg_.api_key);
            if (!cfg_.engine_id.empty()) params.emplace("cx", cfg_.engine_id);

            const auto r = transport_.get("", params);
            if (is_quota_error(r)) fail(ErrorCode::QuotaExceeded, "search quota exceeded: " + excerpt(r.body));
            if (!r.ok())
                fail(ErrorCode::ProviderRejected, "search endpoint returned HTTP " + std::to_string(r.status) + ": " + excerpt(r.body));
            const auto j = parse_json_body(r, "search endpoint");
            if (!j.is_object()) fail(ErrorCode::MalformedResponse, "search response is not an object");
            const auto items = j.value("items", nlohmann::json::array());
            if (!items.is_array()) fail(ErrorCode::MalformedResponse, "search items is not an array");

            for (const auto& item : items) {
                if (out.size() >= count) break;
                if (!item.is_object() || !item.contains("link") || !item["link"].is_string())
                    fail(ErrorCode::MalformedResponse, "search item without a link");
                WebSearchResult res;
                res.image_uri = item["link"].get<std::string>();
                if (item.contains("title") && item["title"].is_string()) res.title = item["title"].get<std::string>();
                res.source_rank = out.size() + 1;
                const auto thumb = string_at(item, "/image/thumbnailLink");
                if (cfg_.fetch_thumbnails && !thumb.empty()) res.thumbnail_bytes = fetch_thumbnail(thumb);
                out.push_back(std::move(res));
            }
            if (items.size() < want) break;
        }
        return out;
    }

    std::optional<std::string> fetch_thumbnail(const std::string& url) const {
        try {
            auto r = HttpTransport::fetch(url, cfg_.http);
            if (r.ok() && !r.body.empty()) return std::move(r.body);
        } catch (const Error&) {
        }
        return std::nullopt;
    }

    WebSearchClientConfig cfg_;
    HttpTransport transport_;
};

}  // namespace xmodal::providers
