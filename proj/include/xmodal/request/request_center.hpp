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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/providers/chat.hpp"
#include "xmodal/providers/encoder.hpp"
#include "xmodal/providers/language.hpp"
#include "xmodal/providers/web_search.hpp"
#include "xmodal/request/prompt_builder.hpp"
#include "xmodal/request/query.hpp"
#include "xmodal/request/session.hpp"
#include "xmodal/similarity/rank.hpp"
#include "xmodal/store/gallery.hpp"
#include "xmodal/store/representation_store.hpp"

namespace xmodal::request {

using store::GalleryMode;

/// Score given to web results whose thumbnail is missing or cannot be
/// encoded. They sort after everything scorable, in source order.
inline constexpr double kUnscorable = -1.0;

struct RequestConfig {
    std::size_t default_k = 10;
    std::size_t web_results = providers::kDefaultWebResults;
    std::size_t history_window = kHistoryWindow;
    NormalizeOptions normalize;
    sim::ScorerConfig scorer;
    sim::RankOptions rank;
};

struct ProviderSet {
    const providers::LanguageDetector* detector = nullptr;  // defaults to the bundled detector
    providers::ChatProvider* chat = nullptr;
    providers::Encoder* encoder = nullptr;
    providers::WebSearchProvider* search = nullptr;  // optional; web mode fails without it
};

struct ImageHit {
    std::string item_id;
    std::string uri;
    std::string title;             // web results only
    std::size_t source_rank = 0;   // web results only
    double score = 0.0;
    std::size_t rank = 0;

    friend bool operator==(const ImageHit&, const ImageHit&) = default;
};

struct TextSearchResult {
    NormalizedQuery query;
    std::vector<ImageHit> hits;
};

struct DescriptionHit {
    std::string description_id;
    std::string text;
    std::string image_id;
    std::string image_uri;
    double score = 0.0;
    std::size_t rank = 0;
};

struct PoolDescription {
    std::string id;
    std::string text;
    double score = 0.0;
};

struct ChatTurnResult {
    std::string session_id;
    std::string reply;
    std::vector<std::string> attached_descriptions;
};

/// Routes every request through detection, translation, summarization,
/// encoding, scoring and prompting. Holds no per-request state; sessions
/// live in the SessionStore and chat turns on one session are serialized.
class RequestCenter {
public:
    using AlbumResolver = std::function<std::shared_ptr<store::AlbumGallery>(std::string_view owner)>;

    RequestCenter(ProviderSet providers, RequestConfig cfg, store::StoreHandle common, store::StoreHandle pool,
                  SessionStore& sessions)
        : p_(providers), cfg_(std::move(cfg)), common_(std::move(common)), pool_(std::move(pool)), sessions_(&sessions),
          scorer_(sim::make_scorer(cfg_.scorer)) {
        if (!p_.detector) p_.detector = &providers::default_language_detector();
        if (!p_.chat || !p_.encoder) fail(ErrorCode::InvalidArgument, "request center needs chat and encoder providers");
        for (const auto& s : {common_, pool_})
            if (s && !(s->dims() == p_.encoder->dims()))
                fail(ErrorCode::DimMismatch, "store dims differ from the encoder's dims");
    }

    void set_album_resolver(AlbumResolver r) { albums_ = std::move(r); }

    const RequestConfig& config() const { return cfg_; }
    const store::StoreHandle& common_store() const { return common_; }

    NormalizedQuery normalize_query(std::string_view text) const {
        return request::normalize_query(text, *p_.detector, *p_.chat, *p_.encoder, cfg_.normalize);
    }

    TextSearchResult text_to_image(std::string_view query_text, GalleryMode mode, std::size_t k,
                                   std::string_view owner = {}) const {
        if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
        if (mode == GalleryMode::Web) {
            auto r = google_mode_search(query_text);
            if (r.hits.size() > k) r.hits.resize(k);
            return r;
        }
        // resolve the gallery first so a missing album fails before any provider call
        std::shared_ptr<const store::AlbumSnapshot> album;
        if (mode == GalleryMode::Album) {
            album = album_for(owner)->snapshot();
            if (album->size() == 0) fail(ErrorCode::EmptyGallery, "album is empty");
        } else if (!common_ || common_->image_count() == 0) {
            fail(ErrorCode::EmptyGallery, "common gallery has no images");
        }

        TextSearchResult out;
        out.query = normalize_query(query_text);
        const auto q = p_.encoder->encode_text(out.query.english_text);
        auto ranked = album ? sim::rank(RepresentationView::of(q), *album, k, *scorer_, cfg_.rank)
                            : rank_common(q, ItemKind::Image, k);
        for (auto& r : ranked) {
            ImageHit h;
            h.item_id = r.item_id;
            h.uri = album ? album_uri(*album, r.item_id) : common_->image(r.item_id).uri;
            h.score = r.score;
            h.rank = r.rank;
            out.hits.push_back(std::move(h));
        }
        return out;
    }

    std::vector<DescriptionHit> image_to_text(const std::string& image_bytes, GalleryMode mode, std::size_t k) const {
        check_description_search(mode, k);
        providers::validate_payload(providers::Payload::image(image_bytes));
        require_descriptions();
        return describe_representation(p_.encoder->encode_image(image_bytes), k);
    }

    /// image_to_text for an image already in the common gallery, using its
    /// stored representation instead of encoding bytes.
    std::vector<DescriptionHit> item_to_text(std::string_view image_id, GalleryMode mode, std::size_t k) const {
        check_description_search(mode, k);
        require_descriptions();
        return describe_representation(common_->get_representation(image_id, ItemKind::Image), k);
    }

    /// Fetches up to web_results results and orders them by engine score,
    /// ties by source rank. The output is always a permutation of the input.
    TextSearchResult google_mode_search(std::string_view query_text) const {
        if (!p_.search) fail(ErrorCode::ProviderUnavailable, "no web search provider configured");
        TextSearchResult out;
        out.query = normalize_query(query_text);
        const auto fetched = p_.search->search(out.query.english_text, cfg_.web_results);
        if (fetched.empty()) fail(ErrorCode::NoResults, "web search returned nothing");

        const auto q = p_.encoder->encode_text(out.query.english_text);
        const auto prepared = scorer_->prepare(RepresentationView::of(q));
        for (const auto& r : fetched) {
            ImageHit h;
            h.item_id = "web-" + std::to_string(r.source_rank);
            h.uri = r.image_uri;
            h.title = r.title;
            h.source_rank = r.source_rank;
            h.score = kUnscorable;
            if (r.thumbnail_bytes) {
                try {
                    const auto rep = p_.encoder->encode_image(*r.thumbnail_bytes);
                    h.score = scorer_->score(prepared, RepresentationView::of(rep));
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::UnsupportedPayload) throw;
                }
            }
            out.hits.push_back(std::move(h));
        }
        std::stable_sort(out.hits.begin(), out.hits.end(), [](const ImageHit& a, const ImageHit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.source_rank < b.source_rank;
        });
        for (std::size_t i = 0; i < out.hits.size(); ++i) out.hits[i].rank = i + 1;
        return out;
    }

    /// The top-1 pool description for each image, in input order.
    std::vector<PoolDescription> describe_images(const std::vector<std::string>& images) const {
        if (images.empty()) return {};
        const auto& pool = pool_ ? pool_ : common_;
        if (!pool || pool->description_count() == 0) fail(ErrorCode::EmptyPool, "description pool is empty");
        for (const auto& img : images) providers::validate_payload(providers::Payload::image(img));

        std::vector<PoolDescription> out;
        out.reserve(images.size());
        const auto candidates = pool->candidates(ItemKind::Description);
        for (const auto& img : images) {
            const auto q = p_.encoder->encode_image(img);
            const auto top = sim::rank(RepresentationView::of(q), candidates, 1, *scorer_, cfg_.rank);
            out.push_back({top[0].item_id, pool->description(top[0].item_id).text, top[0].score});
        }
        return out;
    }

    ChatSession create_session(std::string owner = {}) {
        ChatSession s;
        s.id = random_hex_id();
        s.owner = std::move(owner);
        sessions_->save(s);
        return s;
    }

    /// Sessions owned by someone else are reported as unknown.
    ChatSession session(const std::string& id, std::string_view owner = {}) const {
        auto s = sessions_->load(id);
        if (!s || s->owner != owner) fail(ErrorCode::UnknownSession, "no such chat session");
        return *s;
    }

    /// describe_images, build_chat_prompt, chat, then append the user and
    /// assistant turns. On any failure the stored session is untouched.
    ChatTurnResult chat_turn(const std::string& session_id, std::string_view user_text,
                             const std::vector<std::string>& images, std::string_view owner = {}) {
        if (is_blank(user_text)) fail(ErrorCode::EmptyText, "chat message is empty");
        const auto lock_ptr = session_lock(session_id);
        std::lock_guard lock(*lock_ptr);

        ChatSession s = session(session_id, owner);
        std::vector<std::string> descriptions;
        for (auto& d : describe_images(images)) descriptions.push_back(std::move(d.text));
        const auto prompt = build_chat_prompt(s, user_text, descriptions, cfg_.history_window);
        const std::string reply =
            cfg_.normalize.chat_params ? p_.chat->chat(prompt, *cfg_.normalize.chat_params) : p_.chat->chat(prompt);

        s.turns.push_back(prompt.back());
        s.turns.push_back({Role::Assistant, reply});
        s.attached_descriptions.push_back(descriptions);
        sessions_->save(s);
        return {s.id, reply, std::move(descriptions)};
    }

private:
    static void check_description_search(GalleryMode mode, std::size_t k) {
        if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
        if (mode == GalleryMode::Web) fail(ErrorCode::InvalidArgument, "web mode answers text queries only");
        if (mode == GalleryMode::Album) fail(ErrorCode::EmptyGallery, "albums hold images without descriptions");
    }

    void require_descriptions() const {
        if (!common_ || common_->description_count() == 0) fail(ErrorCode::EmptyGallery, "common gallery has no descriptions");
    }

    std::vector<DescriptionHit> describe_representation(const Representation& q, std::size_t k) const {
        std::vector<DescriptionHit> out;
        for (auto& r : rank_common(q, ItemKind::Description, k)) {
            const auto& d = common_->description(r.item_id);
            const auto& image_id = common_->resolve_links(r.item_id);
            out.push_back({r.item_id, d.text, image_id, common_->image(image_id).uri, r.score, r.rank});
        }
        return out;
    }

    std::vector<sim::RankedResult> rank_common(const Representation& q, ItemKind kind, std::size_t k) const {
        return sim::rank(RepresentationView::of(q), common_->candidates(kind), k, *scorer_, cfg_.rank);
    }

    std::shared_ptr<store::AlbumGallery> album_for(std::string_view owner) const {
        if (owner.empty()) fail(ErrorCode::Unauthenticated, "album mode requires an account");
        if (!albums_) fail(ErrorCode::EmptyGallery, "no albums configured");
        auto album = albums_(owner);
        if (!album) fail(ErrorCode::EmptyGallery, "account has no album");
        return album;
    }

    static std::string album_uri(const store::AlbumSnapshot& album, std::string_view id) {
        for (std::size_t i = 0; i < album.size(); ++i)
            if (album.id(i) == id) return album.item(i).uri;
        return {};
    }

    std::shared_ptr<std::mutex> session_lock(const std::string& id) {
        std::lock_guard lock(locks_mu_);
        auto& slot = session_locks_[id];
        if (!slot) slot = std::make_shared<std::mutex>();
        return slot;
    }

    ProviderSet p_;
    RequestConfig cfg_;
    store::StoreHandle common_;
    store::StoreHandle pool_;
    SessionStore* sessions_;
    std::unique_ptr<sim::Scorer> scorer_;
    AlbumResolver albums_;
    std::mutex locks_mu_;
    std::map<std::string, std::shared_ptr<std::mutex>> session_locks_;
};

}  // namespace xmodal::request
