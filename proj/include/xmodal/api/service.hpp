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

#include <sodium.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xmodal/api/accounts.hpp"
#include "xmodal/api/albums.hpp"
#include "xmodal/api/config.hpp"
#include "xmodal/api/errors.hpp"
#include "xmodal/api/kv_store.hpp"
#include "xmodal/request/request_center.hpp"
#include "xmodal/store/representation_store.hpp"

namespace xmodal::api {

struct ServiceProviders {
    providers::ChatProvider* chat = nullptr;
    providers::Encoder* encoder = nullptr;
    providers::WebSearchProvider* search = nullptr;         // optional
    const providers::LanguageDetector* detector = nullptr;  // optional
};

namespace detail {

inline std::string dump(const nlohmann::json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(dump(body), "application/json");
}

inline void send_error(httplib::Response& res, const ApiError& e) { send_json(res, e.http_status, to_json(e)); }

inline nlohmann::json json_body(const httplib::Request& req) {
    auto j = nlohmann::json::parse(req.body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
}

inline std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) fail(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

inline std::string req_string(const nlohmann::json& j, const char* key) {
    auto v = opt_string(j, key);
    if (!v) fail(ErrorCode::InvalidArgument, std::string("'") + key + "' is required");
    return *v;
}

inline std::size_t parse_count(std::string_view s, const char* what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(ErrorCode::InvalidArgument, std::string(what) + " must be a positive integer");
    return v;
}

inline store::GalleryMode parse_mode(std::string_view s) {
    const auto m = store::parse_gallery_mode(s);
    if (!m) fail(ErrorCode::UnknownMode, "unknown gallery mode '" + std::string(s) + "'");
    return *m;
}

inline std::string strip_data_url(std::string_view s) {
    if (s.rfind("data:", 0) == 0) {
        const auto comma = s.find(',');
        if (comma == std::string_view::npos) fail(ErrorCode::InvalidArgument, "malformed data URL");
        s.remove_prefix(comma + 1);
    }
    return std::string(s);
}

inline std::string decode_base64(std::string_view encoded, std::size_t limit) {
    if (encoded.size() / 4 * 3 > limit + 3) fail(ErrorCode::TooLarge, "image exceeds the upload limit");
    std::string out(encoded.size() / 4 * 3 + 3, '\0');
    std::size_t len = 0;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), encoded.data(), encoded.size(),
                          " \r\n", &len, nullptr, sodium_base64_VARIANT_ORIGINAL) != 0)
        fail(ErrorCode::InvalidArgument, "image is not valid base64");
    out.resize(len);
    if (out.size() > limit) fail(ErrorCode::TooLarge, "image exceeds the upload limit");
    return out;
}

inline bool safe_relative(const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute()) return false;
    for (const auto& part : p)
        if (part == ".." || part == ".") return false;
    return true;
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::NotFound, "no such media file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// JSON API over a RequestCenter: accounts, retrieval in all three modes,
/// chat, album uploads, gallery listings and media. Every failure is sent
/// as {"error": {"code", "message"}} with the status from http_status().
class ApiService {
public:
    ApiService(ServiceConfig cfg, ServiceProviders p, PasswordHashing hashing = {})
        : cfg_((cfg.validate(), std::move(cfg))), providers_(p), kv_(cfg_.database_path()), accounts_(kv_, hashing),
          sessions_(kv_), albums_(cfg_.albums_dir(), cfg_.dims, cfg_.album_capacity) {
        if (!p.chat || !p.encoder) fail(ErrorCode::InvalidArgument, "service needs chat and encoder providers");
        if (!(p.encoder->dims() == cfg_.dims)) fail(ErrorCode::DimMismatch, "encoder dims differ from the configured dims");
        if (!cfg_.common_store.empty()) common_ = store::RepresentationStore::open(cfg_.common_store);
        if (!cfg_.description_pool.empty()) pool_ = store::RepresentationStore::open_pool(cfg_.description_pool);
        if (common_) {
            for (const auto& img : common_->manifest().images) common_items_.push_back({img.id, public_uri(img.uri)});
            std::sort(common_items_.begin(), common_items_.end());
        }
        request::RequestConfig rc;
        rc.default_k = cfg_.default_k;
        rc.scorer = cfg_.scorer;
        center_ = std::make_unique<request::RequestCenter>(
            request::ProviderSet{p.detector, p.chat, p.encoder, p.search}, rc, common_, pool_, sessions_);
        center_->set_album_resolver([this](std::string_view owner) { return albums_.get(std::string(owner)); });
    }

    const ServiceConfig& config() const { return cfg_; }
    request::RequestCenter& center() { return *center_; }
    Accounts& accounts() { return accounts_; }
    AlbumRegistry& albums() { return albums_; }

    /// Largest request body accepted before any handler runs.
    std::size_t payload_limit() const {
        return cfg_.upload_limit_bytes / 3 * 4 * cfg_.max_images_per_request + (1u << 20);
    }

    void mount(httplib::Server& srv) {
        srv.set_payload_max_length(payload_limit());
        srv.Post("/auth/register", guarded(&ApiService::post_register));
        srv.Post("/auth/login", guarded(&ApiService::post_login));
        srv.Get("/account", guarded(&ApiService::get_account));
        srv.Post("/search/text", guarded(&ApiService::post_search_text));
        srv.Post("/search/image", guarded(&ApiService::post_search_image));
        srv.Post("/chat", guarded(&ApiService::post_chat));
        srv.Get(R"(/chat/([^/]+))", guarded(&ApiService::get_chat));
        srv.Post("/album/upload", guarded(&ApiService::post_album_upload));
        srv.Get(R"(/gallery/([^/]+)/items)", guarded(&ApiService::get_gallery_items));
        srv.Get(R"(/media/common/(.+))", guarded(&ApiService::get_common_media));
        srv.Get(R"(/media/album/([^/]+))", guarded(&ApiService::get_album_media));
        srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            detail::send_json(res, 200, {{"status", "ok"}});
        });
        if (!cfg_.static_dir.empty()) srv.set_mount_point("/", cfg_.static_dir.string());

        // failures raised by httplib itself, before any handler
        srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            ApiError e;
            switch (res.status) {
                case 404: e = api_error(ErrorCode::NotFound, "no such route"); break;
                case 413:
                case 414:
                case 431: e = api_error(ErrorCode::TooLarge, "request too large"); break;
                default:
                    e = res.status < 500 ? api_error(ErrorCode::InvalidArgument, "malformed request")
                                         : api_error(ErrorCode::Internal, "internal error");
            }
            detail::send_error(res, e);
            return httplib::Server::HandlerResponse::Handled;
        });
        srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
            detail::send_error(res, api_error(ErrorCode::Internal, "internal error"));
        });
    }

    /// Relative manifest uris are served from media_root under /media/common/.
    static std::string public_uri(const std::string& uri) {
        if (uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0 || uri.rfind("/", 0) == 0) return uri;
        return "/media/common/" + uri;
    }

private:
    using Handler = void (ApiService::*)(const httplib::Request&, httplib::Response&);

    httplib::Server::Handler guarded(Handler h) {
        return [this, h](const httplib::Request& req, httplib::Response& res) {
            try {
                (this->*h)(req, res);
            } catch (const Error& e) {
                detail::send_error(res, to_api_error(e));
            } catch (const std::exception&) {
                detail::send_error(res, api_error(ErrorCode::Internal, "internal error"));
            }
        };
    }

    /// Present but invalid credentials are rejected even where auth is optional.
    std::optional<Account> auth(const httplib::Request& req) {
        std::string token;
        if (req.has_header("Authorization")) {
            const auto h = req.get_header_value("Authorization");
            if (h.rfind("Bearer ", 0) != 0) fail(ErrorCode::Unauthenticated, "expected a bearer token");
            token = h.substr(7);
        } else if (req.has_param("token")) {
            token = req.get_param_value("token");
        } else {
            return std::nullopt;
        }
        auto account = accounts_.authenticate(token);
        if (!account) fail(ErrorCode::Unauthenticated, "invalid or expired token");
        return account;
    }

    Account require_auth(const httplib::Request& req) {
        auto a = auth(req);
        if (!a) fail(ErrorCode::Unauthenticated, "this endpoint requires an account");
        return *a;
    }

    std::size_t k_from_json(const nlohmann::json& j) const {
        if (!j.contains("k") || j.at("k").is_null()) return cfg_.default_k;
        if (!j.at("k").is_number_integer() || j.at("k").get<long long>() < 1 ||
            j.at("k").get<long long>() > static_cast<long long>(cfg_.max_k))
            fail(ErrorCode::InvalidArgument, "k must be an integer from 1 to " + std::to_string(cfg_.max_k));
        return j.at("k").get<std::size_t>();
    }

    std::size_t k_from_string(const std::string& s) const {
        const auto k = detail::parse_count(s, "k");
        if (k < 1 || k > cfg_.max_k) fail(ErrorCode::InvalidArgument, "k must be from 1 to " + std::to_string(cfg_.max_k));
        return k;
    }

    void check_image_size(const std::string& bytes) const {
        if (bytes.size() > cfg_.upload_limit_bytes)
            fail(ErrorCode::TooLarge, "image exceeds the " + std::to_string(cfg_.upload_limit_bytes) + " byte limit");
    }

    static nlohmann::json account_json(const Account& a) {
        return {{"account_id", a.account_id}, {"username", a.username}, {"display_name", a.display_name}};
    }

    // --- handlers -------------------------------------------------------------

    void post_register(const httplib::Request& req, httplib::Response& res) {
        const auto j = detail::json_body(req);
        const auto issued = accounts_.register_account(detail::req_string(j, "username"), detail::req_string(j, "password"),
                                                       detail::opt_string(j, "display_name").value_or(""));
        auto body = account_json(issued.account);
        body["token"] = issued.token;
        detail::send_json(res, 201, body);
    }

    void post_login(const httplib::Request& req, httplib::Response& res) {
        const auto j = detail::json_body(req);
        const auto issued = accounts_.login(detail::req_string(j, "username"), detail::req_string(j, "password"));
        auto body = account_json(issued.account);
        body["token"] = issued.token;
        detail::send_json(res, 200, body);
    }

    void get_account(const httplib::Request& req, httplib::Response& res) {
        const auto a = require_auth(req);
        const auto info = albums_.get(a.account_id)->info();
        auto body = account_json(a);
        body["album"] = {{"item_count", info.item_count}, {"capacity", albums_.capacity()}};
        detail::send_json(res, 200, body);
    }

    void post_search_text(const httplib::Request& req, httplib::Response& res) {
        const auto j = detail::json_body(req);
        const auto account = auth(req);
        const auto query = detail::req_string(j, "query");
        const auto mode = detail::parse_mode(detail::opt_string(j, "mode").value_or("common"));
        const auto k = k_from_json(j);
        const auto r = center_->text_to_image(query, mode, k, account ? account->account_id : std::string());

        nlohmann::json results = nlohmann::json::array();
        for (const auto& h : r.hits) {
            nlohmann::json row = {{"item_id", h.item_id},
                                  {"uri", mode == store::GalleryMode::Common ? public_uri(h.uri) : h.uri},
                                  {"score", h.score},
                                  {"rank", h.rank}};
            if (mode == store::GalleryMode::Web) {
                row["title"] = h.title;
                row["source_rank"] = h.source_rank;
            }
            results.push_back(std::move(row));
        }
        detail::send_json(res, 200,
                          {{"mode", store::to_string(mode)},
                           {"query",
                            {{"original_text", r.query.original_text},
                             {"english_text", r.query.english_text},
                             {"detected_lang", r.query.detected_lang},
                             {"was_translated", r.query.was_translated},
                             {"was_summarized", r.query.was_summarized},
                             {"token_count", r.query.token_count}}},
                           {"results", results}});
    }

    void post_search_image(const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data()) fail(ErrorCode::InvalidArgument, "expected multipart/form-data");
        auth(req);
        const auto field = [&](const char* name) -> std::optional<std::string> {
            if (!req.has_file(name)) return std::nullopt;
            return req.get_file_value(name).content;
        };
        const auto mode = detail::parse_mode(field("mode").value_or("common"));
        const auto k = field("k") ? k_from_string(*field("k")) : cfg_.default_k;

        std::vector<request::DescriptionHit> hits;
        if (req.has_file("image")) {
            const auto image = req.get_file_value("image").content;
            check_image_size(image);
            hits = center_->image_to_text(image, mode, k);
        } else if (const auto item = field("item_id")) {
            hits = center_->item_to_text(*item, mode, k);
        } else {
            fail(ErrorCode::InvalidArgument, "send an 'image' file or an 'item_id' field");
        }
        nlohmann::json results = nlohmann::json::array();
        for (const auto& h : hits)
            results.push_back({{"description_id", h.description_id},
                               {"description", h.text},
                               {"image_id", h.image_id},
                               {"image_uri", public_uri(h.image_uri)},
                               {"score", h.score},
                               {"rank", h.rank}});
        detail::send_json(res, 200, {{"mode", store::to_string(mode)}, {"results", results}});
    }

    void post_chat(const httplib::Request& req, httplib::Response& res) {
        const auto j = detail::json_body(req);
        const auto account = auth(req);
        const std::string owner = account ? account->account_id : std::string();
        const auto text = detail::req_string(j, "text");
        if (is_blank(text)) fail(ErrorCode::EmptyText, "chat message is empty");

        std::vector<std::string> images;
        if (j.contains("images") && !j.at("images").is_null()) {
            const auto& arr = j.at("images");
            if (!arr.is_array()) fail(ErrorCode::InvalidArgument, "'images' must be a list of base64 strings");
            if (arr.size() > cfg_.max_images_per_request)
                fail(ErrorCode::TooLarge, "at most " + std::to_string(cfg_.max_images_per_request) + " images per message");
            for (const auto& img : arr) {
                if (!img.is_string()) fail(ErrorCode::InvalidArgument, "'images' must be a list of base64 strings");
                images.push_back(detail::decode_base64(detail::strip_data_url(img.get<std::string>()), cfg_.upload_limit_bytes));
            }
        }
        auto session_id = detail::opt_string(j, "session_id");
        if (!session_id) session_id = center_->create_session(owner).id;
        const auto turn = center_->chat_turn(*session_id, text, images, owner);
        detail::send_json(res, 200,
                          {{"session_id", turn.session_id},
                           {"reply", turn.reply},
                           {"attached_descriptions", turn.attached_descriptions}});
    }

    void get_chat(const httplib::Request& req, httplib::Response& res) {
        const auto account = auth(req);
        const auto s = center_->session(req.matches[1], account ? account->account_id : std::string());
        nlohmann::json turns = nlohmann::json::array();
        for (const auto& m : s.turns) turns.push_back({{"role", providers::to_string(m.role)}, {"content", m.content}});
        detail::send_json(res, 200,
                          {{"session_id", s.id}, {"turns", turns}, {"attached_descriptions", s.attached_descriptions}});
    }

    void post_album_upload(const httplib::Request& req, httplib::Response& res) {
        const auto account = require_auth(req);
        if (!req.is_multipart_form_data()) fail(ErrorCode::InvalidArgument, "expected multipart/form-data");
        std::vector<std::string> images;
        for (const char* name : {"images", "image"})
            for (const auto& f : req.get_file_values(name)) images.push_back(f.content);
        if (images.size() > cfg_.max_images_per_request)
            fail(ErrorCode::TooLarge, "at most " + std::to_string(cfg_.max_images_per_request) + " images per upload");
        for (const auto& img : images) check_image_size(img);
        const auto ids = albums_.upload(account.account_id, images, *providers_.encoder);
        const auto info = albums_.get(account.account_id)->info();
        detail::send_json(res, 200,
                          {{"item_ids", ids}, {"album", {{"item_count", info.item_count}, {"capacity", albums_.capacity()}}}});
    }

    void get_gallery_items(const httplib::Request& req, httplib::Response& res) {
        const auto mode = detail::parse_mode(req.matches[1].str());
        const std::size_t page = req.has_param("page") ? detail::parse_count(req.get_param_value("page"), "page") : 1;
        if (page == 0) fail(ErrorCode::InvalidArgument, "pages are numbered from 1");

        std::vector<std::pair<std::string, std::string>> album_items;
        const std::vector<std::pair<std::string, std::string>>* items = &album_items;
        if (mode == store::GalleryMode::Album) {
            const auto account = require_auth(req);
            const auto snap = albums_.get(account.account_id)->snapshot();
            for (std::size_t i = 0; i < snap->size(); ++i) album_items.emplace_back(snap->item(i).id, snap->item(i).uri);
            std::sort(album_items.begin(), album_items.end());
        } else if (mode == store::GalleryMode::Common) {
            auth(req);
            items = &common_items_;
        } else {
            auth(req);  // web results are live; nothing is stored to list
        }

        nlohmann::json rows = nlohmann::json::array();
        const std::size_t begin =
            page - 1 > items->size() / cfg_.page_size ? items->size() : std::min(items->size(), (page - 1) * cfg_.page_size);
        for (std::size_t i = begin; i < items->size() && i < begin + cfg_.page_size; ++i)
            rows.push_back({{"item_id", (*items)[i].first}, {"uri", (*items)[i].second}});
        detail::send_json(res, 200,
                          {{"mode", store::to_string(mode)},
                           {"page", page},
                           {"page_size", cfg_.page_size},
                           {"total", items->size()},
                           {"items", rows}});
    }

    void get_common_media(const httplib::Request& req, httplib::Response& res) {
        const std::filesystem::path rel(req.matches[1].str());
        if (cfg_.media_root.empty() || !detail::safe_relative(rel)) fail(ErrorCode::NotFound, "no such media file");
        const auto path = cfg_.media_root / rel;
        if (!std::filesystem::is_regular_file(path)) fail(ErrorCode::NotFound, "no such media file");
        send_media(res, detail::read_bytes(path));
    }

    void get_album_media(const httplib::Request& req, httplib::Response& res) {
        const auto account = require_auth(req);
        const auto path = albums_.media_file(account.account_id, req.matches[1].str());
        if (!path) fail(ErrorCode::NotFound, "no such media file");
        send_media(res, detail::read_bytes(*path));
    }

    static void send_media(httplib::Response& res, std::string bytes) {
        const auto fmt = providers::sniff_image(bytes);
        const std::string type =
            fmt == providers::ImageFormat::Unknown ? "application/octet-stream" : std::string(providers::mime_type(fmt));
        res.status = 200;
        res.set_content(std::move(bytes), type);
    }

    ServiceConfig cfg_;
    ServiceProviders providers_;
    KvStore kv_;
    Accounts accounts_;
    KvSessionStore sessions_;
    AlbumRegistry albums_;
    store::StoreHandle common_;
    store::StoreHandle pool_;
    std::vector<std::pair<std::string, std::string>> common_items_;  // (id, public uri), sorted by id
    std::unique_ptr<request::RequestCenter> center_;
};

/// An httplib server bound to one ApiService.
class ApiServer {
public:
    explicit ApiServer(ApiService& service) {
        const std::size_t threads = service.config().threads;
        server_.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
        service.mount(server_);
    }
    ~ApiServer() { stop(); }

    /// Binds to `port` (0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port) {
        if (port == 0) {
            port_ = server_.bind_to_any_port(host);
        } else {
            port_ = server_.bind_to_port(host, port) ? port : -1;
        }
        if (port_ < 0) fail(ErrorCode::Internal, "cannot bind " + host + ":" + std::to_string(port));
        return port_;
    }

    /// Serves on a background thread.
    void start() {
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    /// Serves on the calling thread until stop().
    void run() { server_.listen_after_bind(); }

    /// Stops accepting and lets in-flight requests finish.
    void stop() {
        if (server_.is_running()) server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }
    httplib::Server& server() { return server_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
};

}  // namespace xmodal::api
