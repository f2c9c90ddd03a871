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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/providers/http.hpp"
#include "xmodal/providers/types.hpp"
#include "xmodal/similarity/scorer.hpp"
#include "xmodal/store/gallery.hpp"

namespace xmodal::api {

inline constexpr std::size_t kDefaultUploadLimit = 10 * 1024 * 1024;
inline constexpr std::size_t kDefaultPageSize = 50;

struct ProviderConfig {
    std::string kind = "http";  // "http" or "mock"

    std::string chat_endpoint = "https://api.openai.com/v1";
    std::string chat_model = "gpt-3.5-turbo";
    double chat_temperature = 0.0;
    std::string llm_api_key;

    std::string encoder_endpoint = "http://127.0.0.1:8100";

    std::string search_endpoint = "https://www.googleapis.com/customsearch/v1";
    std::string search_api_key;
    std::string search_engine_id;

    providers::HttpOptions http;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "xmodal-data";   // accounts database, albums
    std::filesystem::path common_store;                // manifest of the shared gallery
    std::filesystem::path description_pool;            // manifest of the caption pool
    std::filesystem::path media_root;                  // files behind common gallery uris
    std::filesystem::path static_dir;                  // built web front-end, optional
    Dims dims = kDefaultDims;
    std::size_t upload_limit_bytes = kDefaultUploadLimit;
    std::size_t max_images_per_request = 20;
    std::size_t album_capacity = store::kDefaultAlbumCapacity;
    std::size_t page_size = kDefaultPageSize;
    std::size_t default_k = 10;
    std::size_t max_k = 100;
    std::size_t threads = 8;
    sim::ScorerConfig scorer;
    ProviderConfig providers;

    std::filesystem::path database_path() const { return data_dir / "xmodal.sqlite"; }
    std::filesystem::path albums_dir() const { return data_dir / "albums"; }

    void validate() const {
        auto positive = [](std::size_t v, const char* name) {
            if (v == 0) fail(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
        };
        positive(upload_limit_bytes, "upload_limit_bytes");
        positive(max_images_per_request, "max_images_per_request");
        positive(album_capacity, "album_capacity");
        positive(page_size, "page_size");
        positive(default_k, "default_k");
        positive(max_k, "max_k");
        positive(threads, "threads");
        positive(dims.global, "dims.global");
        positive(dims.local, "dims.local");
        positive(dims.locals_per_item, "dims.locals_per_item");
        if (default_k > max_k) fail(ErrorCode::InvalidArgument, "default_k exceeds max_k");
        if (port < 0 || port > 65535) fail(ErrorCode::InvalidArgument, "port out of range");
        if (providers.kind != "http" && providers.kind != "mock")
            fail(ErrorCode::InvalidArgument, "providers.kind must be \"http\" or \"mock\"");
        scorer.validate();
    }
};

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::InvalidArgument, std::string("config field '") + key + "' has the wrong type");
    }
}

inline void read_path(const nlohmann::json& j, const char* key, std::filesystem::path& out,
                      const std::filesystem::path& base) {
    std::string s;
    read_field(j, key, s);
    if (s.empty()) return;
    out = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s) : base / s;
}

inline const nlohmann::json& section(const nlohmann::json& j, const char* key) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) fail(ErrorCode::InvalidArgument, std::string("config section '") + key + "' must be an object");
    return j.at(key);
}

}  // namespace detail

/// Relative paths resolve against `base` (the config file's directory).
inline ServiceConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    if (!j.is_object()) fail(ErrorCode::InvalidArgument, "config must be a JSON object");
    using detail::read_field;
    using detail::read_path;
    ServiceConfig c;
    read_field(j, "host", c.host);
    read_field(j, "port", c.port);
    read_path(j, "data_dir", c.data_dir, base);
    if (!j.contains("data_dir") && !base.empty()) c.data_dir = base / c.data_dir;
    read_path(j, "common_store", c.common_store, base);
    read_path(j, "description_pool", c.description_pool, base);
    read_path(j, "media_root", c.media_root, base);
    read_path(j, "static_dir", c.static_dir, base);
    read_field(j, "upload_limit_bytes", c.upload_limit_bytes);
    read_field(j, "max_images_per_request", c.max_images_per_request);
    read_field(j, "album_capacity", c.album_capacity);
    read_field(j, "page_size", c.page_size);
    read_field(j, "default_k", c.default_k);
    read_field(j, "max_k", c.max_k);
    read_field(j, "threads", c.threads);

    const auto& dims = detail::section(j, "dims");
    read_field(dims, "global", c.dims.global);
    read_field(dims, "local", c.dims.local);
    read_field(dims, "locals_per_item", c.dims.locals_per_item);

    const auto& scorer = detail::section(j, "scorer");
    read_field(scorer, "alpha", c.scorer.alpha);
    read_field(scorer, "id", c.scorer.scorer_id);

    const auto& p = detail::section(j, "providers");
    read_field(p, "kind", c.providers.kind);
    const auto& chat = detail::section(p, "chat");
    read_field(chat, "endpoint", c.providers.chat_endpoint);
    read_field(chat, "model", c.providers.chat_model);
    read_field(chat, "temperature", c.providers.chat_temperature);
    read_field(chat, "api_key", c.providers.llm_api_key);
    const auto& enc = detail::section(p, "encoder");
    read_field(enc, "endpoint", c.providers.encoder_endpoint);
    const auto& search = detail::section(p, "web_search");
    read_field(search, "endpoint", c.providers.search_endpoint);
    read_field(search, "api_key", c.providers.search_api_key);
    read_field(search, "engine_id", c.providers.search_engine_id);
    if (p.contains("http")) {
        try {
            c.providers.http = providers::HttpOptions::from_json(detail::section(p, "http"));
        } catch (const nlohmann::json::exception&) {
            fail(ErrorCode::InvalidArgument, "config section 'providers.http' has a field of the wrong type");
        }
    }

    c.validate();
    return c;
}

/// Secrets and the encoder location may come from the environment, which
/// wins over the file.
inline void apply_env_overrides(ServiceConfig& c, const std::function<const char*(const char*)>& getenv = ::getenv) {
    auto take = [&](const char* name, std::string& out) {
        if (const char* v = getenv(name); v && *v) out = v;
    };
    take("XMODAL_LLM_API_KEY", c.providers.llm_api_key);
    take("XMODAL_SEARCH_API_KEY", c.providers.search_api_key);
    take("XMODAL_SEARCH_ENGINE_ID", c.providers.search_engine_id);
    take("XMODAL_ENCODER_ENDPOINT", c.providers.encoder_endpoint);
}

inline ServiceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
    auto c = config_from_json(j, path.parent_path());
    apply_env_overrides(c);
    return c;
}

}  // namespace xmodal::api
