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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "support/prompt_scenarios.hpp"
#include "support/ranking_oracle.hpp"
#include "support/test_support.hpp"
#include "support/universe.hpp"
#include "xmodal/request/request_center.hpp"

namespace xmodal {
namespace {

using providers::ChatMessage;
using providers::MockChatProvider;
using providers::MockEncoder;
using providers::MockLanguageDetector;
using providers::MockWebSearch;
using providers::Payload;
using providers::Role;
using providers::WebSearchResult;
using request::GalleryMode;
using request::RequestCenter;
using namespace xmodal::testing;

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an xmodal::Error";
    return ErrorCode::Internal;
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.compare(0, prefix.size(), prefix) == 0; }

/// Translates to a fixed English phrase and summarizes to the first 40 tokens.
std::string cooperative_llm(const std::vector<ChatMessage>& msgs) {
    const auto& c = msgs.back().content;
    if (starts_with(c, request::prompts::kTranslate)) return "a man riding a horse";
    if (starts_with(c, request::prompts::kSummarize))
        return providers::truncate_whitespace_tokens(c.substr(request::prompts::kSummarize.size()), 40);
    return "ok";
}

// --- normalize_query ---------------------------------------------------------

struct NormalizeFixture : ::testing::Test {
    MockChatProvider chat;
    MockEncoder encoder{{8, 4, 3}};
    void SetUp() override { chat.set_responder(cooperative_llm); }
    request::NormalizedQuery run(std::string_view text, const request::NormalizeOptions& opts = {}) {
        return request::normalize_query(text, providers::default_language_detector(), chat, encoder, opts);
    }
};

TEST_F(NormalizeFixture, ShortEnglishIsUntouched) {
    const auto q = run("a dog on a skateboard");
    EXPECT_EQ(q.english_text, "a dog on a skateboard");
    EXPECT_EQ(q.detected_lang, "en");
    EXPECT_FALSE(q.was_translated);
    EXPECT_FALSE(q.was_summarized);
    EXPECT_EQ(q.token_count, 5u);
    EXPECT_EQ(chat.call_count(), 0u);
}

TEST_F(NormalizeFixture, ChineseIsTranslatedWithTheExactTemplate) {
    const auto q = run("一个男人在骑马");
    EXPECT_EQ(q.detected_lang, "zh");
    EXPECT_TRUE(q.was_translated);
    EXPECT_EQ(q.english_text, "a man riding a horse");
    ASSERT_EQ(chat.call_count(), 1u);
    const auto call = chat.calls()[0];
    ASSERT_EQ(call.size(), 1u);
    EXPECT_EQ(call[0].role, Role::User);
    EXPECT_EQ(call[0].content,
              "Translate the following text to English, provide the result directly without explanations: "
              "一个男人在骑马");
}

TEST_F(NormalizeFixture, LongStoryIsSummarizedOnce) {
    SplitMix64 rng(7);
    const auto story = long_english_query(rng, 150);
    ASSERT_EQ(providers::count_whitespace_tokens(story), 150u);
    const auto q = run(story);
    EXPECT_FALSE(q.was_translated);
    EXPECT_TRUE(q.was_summarized);
    EXPECT_EQ(chat.call_count(), 1u);
    EXPECT_LE(q.token_count, request::kQueryTokenLimit);
    EXPECT_EQ(q.token_count, 40u);
    EXPECT_TRUE(starts_with(chat.calls()[0][0].content, request::prompts::kSummarize));
}

TEST_F(NormalizeFixture, StubbornSummarizerEndsInTruncation) {
    SplitMix64 rng(8);
    const auto story = long_english_query(rng, 120);
    chat.set_responder([&](const std::vector<ChatMessage>&) { return story; });
    const auto q = run(story);
    EXPECT_EQ(chat.call_count(), 3u);
    EXPECT_TRUE(q.was_summarized);
    EXPECT_EQ(q.token_count, 77u);
    EXPECT_EQ(q.english_text, providers::truncate_whitespace_tokens(story, 77));
}

TEST_F(NormalizeFixture, EmojiGoesThroughTranslation) {
    const auto q = run("🐴🏇");
    EXPECT_EQ(q.detected_lang, "und");
    EXPECT_TRUE(q.was_translated);
    EXPECT_EQ(chat.call_count(), 1u);
}

TEST_F(NormalizeFixture, ProviderFailureFailsClosed) {
    chat.fail_calls(ErrorCode::ProviderUnavailable);
    EXPECT_EQ(code_of([&] { run("ein Hund spielt im Garten"); }), ErrorCode::ProviderUnavailable);
    SplitMix64 rng(3);
    const auto story = long_english_query(rng, 100);
    EXPECT_EQ(code_of([&] { run(story); }), ErrorCode::ProviderUnavailable);
    EXPECT_EQ(chat.call_count(), 2u);
}

TEST_F(NormalizeFixture, BlankInputAndBlankReplies) {
    EXPECT_EQ(code_of([&] { run(""); }), ErrorCode::EmptyText);
    EXPECT_EQ(code_of([&] { run(" \t\n"); }), ErrorCode::EmptyText);
    chat.set_responder([](const std::vector<ChatMessage>&) { return std::string("   "); });
    EXPECT_EQ(code_of([&] { run("一只猫"); }), ErrorCode::MalformedResponse);
}

TEST_F(NormalizeFixture, MockDetectorDrivesTheBranch) {
    MockLanguageDetector detector;
    detector.set("bonjour", "fr");
    detector.set("ciao", "en");
    auto q = request::normalize_query("bonjour", detector, chat, encoder);
    EXPECT_TRUE(q.was_translated);
    q = request::normalize_query("ciao", detector, chat, encoder);
    EXPECT_FALSE(q.was_translated);
}

TEST_F(NormalizeFixture, InvariantsOverGeneratedQueries) {
    SplitMix64 rng(2024);
    for (int i = 0; i < 600; ++i) {
        chat.reset_calls();
        std::string text;
        switch (rng.below(3)) {
            case 0: text = english_query(rng); break;
            case 1: text = foreign_query(rng); break;
            default: text = long_english_query(rng, 60 + rng.below(200)); break;
        }
        const auto q = run(text);
        SCOPED_TRACE(text);
        EXPECT_LE(q.token_count, request::kQueryTokenLimit);
        EXPECT_EQ(q.token_count, providers::count_whitespace_tokens(q.english_text));
        EXPECT_EQ(q.was_translated, q.detected_lang != "en");
        const std::size_t expected_calls = (q.was_translated ? 1 : 0) + (q.was_summarized ? 1 : 0);
        EXPECT_EQ(chat.call_count(), expected_calls);
        if (!q.was_translated && !q.was_summarized) {
            EXPECT_EQ(q.english_text, text);
        }
    }
}

// --- text_to_image / image_to_text -------------------------------------------

struct CenterFixture : ::testing::Test {
    Universe u = make_universe(99, 300, 900);
    MockChatProvider chat;
    MockEncoder encoder{u.dims, 5};
    request::InMemorySessionStore sessions;
    std::unique_ptr<RequestCenter> center;

    void SetUp() override {
        chat.set_responder(cooperative_llm);
        center = std::make_unique<RequestCenter>(request::ProviderSet{nullptr, &chat, &encoder, nullptr},
                                                 request::RequestConfig{}, u.store, nullptr, sessions);
    }
};

TEST_F(CenterFixture, PlantedImageComesFirstWithScoreOne) {
    encoder.plant(Payload::text("a red bus"), u.images[3].second);
    const auto r = center->text_to_image("a red bus", GalleryMode::Common, 10);
    ASSERT_EQ(r.hits.size(), 10u);
    EXPECT_EQ(r.hits[0].item_id, "i3");
    EXPECT_EQ(r.hits[0].score, 1.0);
    EXPECT_EQ(r.hits[0].rank, 1u);
    EXPECT_EQ(r.hits[0].uri, "media/i3.jpg");
    EXPECT_LT(r.hits[1].score, 1.0);
}

TEST_F(CenterFixture, OversizedKReturnsEverything) {
    const auto r = center->text_to_image("anything", GalleryMode::Common, 5000);
    ASSERT_EQ(r.hits.size(), 300u);
    for (std::size_t i = 0; i < r.hits.size(); ++i) {
        EXPECT_EQ(r.hits[i].rank, i + 1);
        if (i) {
            EXPECT_GE(r.hits[i - 1].score, r.hits[i].score);
        }
    }
}

TEST_F(CenterFixture, TextToImageMatchesTheOracle) {
    SplitMix64 rng(31);
    for (int i = 0; i < 20; ++i) {
        const auto text = i % 2 ? english_query(rng) : foreign_query(rng);
        const auto r = center->text_to_image(text, GalleryMode::Common, 10);
        const auto q = encoder.generated(Payload::text(r.query.english_text));
        const auto expected = brute_force_rank(q, u.images, 10, {});
        ASSERT_EQ(r.hits.size(), expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j) {
            EXPECT_EQ(r.hits[j].item_id, expected[j].item_id);
            EXPECT_EQ(r.hits[j].score, expected[j].score);
        }
    }
}

TEST_F(CenterFixture, ImageToTextReturnsPlantedDescriptionAndItsImage) {
    const auto bytes = fake_jpeg(1);
    encoder.plant(Payload::image(bytes), u.descriptions[1].second);
    const auto r = center->image_to_text(bytes, GalleryMode::Common, 5);
    ASSERT_EQ(r.size(), 5u);
    EXPECT_EQ(r[0].description_id, "d1");
    EXPECT_EQ(r[0].text, "caption number 1");
    EXPECT_EQ(r[0].image_id, "i1");
    EXPECT_EQ(r[0].image_uri, "media/i1.jpg");
    EXPECT_EQ(r[0].score, 1.0);
}

TEST_F(CenterFixture, ImageToTextMatchesTheOracleAndLinksResolve) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto bytes = s % 2 ? fake_png(s) : fake_jpeg(s);
        const auto r = center->image_to_text(bytes, GalleryMode::Common, 25);
        const auto expected = brute_force_rank(encoder.generated(Payload::image(bytes)), u.descriptions, 25, {});
        ASSERT_EQ(r.size(), expected.size());
        for (std::size_t j = 0; j < r.size(); ++j) {
            EXPECT_EQ(r[j].description_id, expected[j].item_id);
            EXPECT_EQ(r[j].score, expected[j].score);
            const auto row = u.store->row_of(ItemKind::Image, r[j].image_id);
            ASSERT_TRUE(row.has_value());
            const std::size_t d = std::stoul(r[j].description_id.substr(1));
            EXPECT_EQ(r[j].image_id, "i" + std::to_string(d % 300));
        }
    }
}

TEST_F(CenterFixture, ItemToTextUsesTheStoredRepresentation) {
    const auto r = center->item_to_text("i7", GalleryMode::Common, 10);
    const auto expected = brute_force_rank(u.images[7].second, u.descriptions, 10, {});
    ASSERT_EQ(r.size(), expected.size());
    for (std::size_t j = 0; j < r.size(); ++j) EXPECT_EQ(r[j].description_id, expected[j].item_id);
    EXPECT_EQ(encoder.encode_count(), 0u);
    EXPECT_EQ(code_of([&] { center->item_to_text("i999", GalleryMode::Common, 10); }), ErrorCode::UnknownItem);
    EXPECT_EQ(code_of([&] { center->item_to_text("i1", GalleryMode::Web, 10); }), ErrorCode::InvalidArgument);
}

TEST_F(CenterFixture, ImageToTextErrors) {
    EXPECT_EQ(code_of([&] { center->image_to_text("GIF89a", GalleryMode::Common, 5); }), ErrorCode::UnsupportedPayload);
    EXPECT_EQ(code_of([&] { center->image_to_text("", GalleryMode::Common, 5); }), ErrorCode::UnsupportedPayload);
    EXPECT_EQ(code_of([&] { center->image_to_text(fake_jpeg(1), GalleryMode::Common, 0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { center->image_to_text(fake_jpeg(1), GalleryMode::Web, 5); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { center->image_to_text(fake_jpeg(1), GalleryMode::Album, 5); }), ErrorCode::EmptyGallery);
}

TEST(RequestCenter, EmptyGalleries) {
    const Universe images_only = make_universe(1, 5, 0);
    MockChatProvider chat;
    MockEncoder encoder(images_only.dims);
    request::InMemorySessionStore sessions;
    RequestCenter center({nullptr, &chat, &encoder, nullptr}, {}, images_only.store, nullptr, sessions);
    EXPECT_EQ(code_of([&] { center.image_to_text(fake_jpeg(1), GalleryMode::Common, 5); }), ErrorCode::EmptyGallery);
    EXPECT_EQ(code_of([&] { center.describe_images({fake_jpeg(1)}); }), ErrorCode::EmptyPool);
    EXPECT_TRUE(center.describe_images({}).empty());

    RequestCenter bare({nullptr, &chat, &encoder, nullptr}, {}, nullptr, nullptr, sessions);
    EXPECT_EQ(code_of([&] { bare.text_to_image("a cat", GalleryMode::Common, 5); }), ErrorCode::EmptyGallery);
    EXPECT_EQ(code_of([&] { bare.text_to_image("a cat", GalleryMode::Web, 5); }), ErrorCode::ProviderUnavailable);
    EXPECT_EQ(code_of([&] { bare.text_to_image("a cat", GalleryMode::Album, 5); }), ErrorCode::Unauthenticated);
    EXPECT_EQ(code_of([&] { bare.text_to_image("a cat", GalleryMode::Album, 5, "alice"); }), ErrorCode::EmptyGallery);
    EXPECT_EQ(chat.call_count(), 0u);
    EXPECT_EQ(encoder.encode_count(), 0u);
}

TEST(RequestCenter, ConstructorChecksDims) {
    const Universe u = make_universe(1, 5, 5);
    MockChatProvider chat;
    MockEncoder encoder({16, 8, 5});
    request::InMemorySessionStore sessions;
    EXPECT_EQ(code_of([&] { RequestCenter({nullptr, &chat, &encoder, nullptr}, {}, u.store, nullptr, sessions); }),
              ErrorCode::DimMismatch);
    EXPECT_EQ(code_of([&] { RequestCenter({nullptr, nullptr, &encoder, nullptr}, {}, nullptr, nullptr, sessions); }),
              ErrorCode::InvalidArgument);
}

TEST(RequestCenter, AlbumModeSearchesOnlyTheOwnersAlbum) {
    const Dims dims{16, 8, 4};
    TempDir dir;
    MockChatProvider chat;
    MockEncoder encoder(dims);
    request::InMemorySessionStore sessions;
    std::map<std::string, std::shared_ptr<store::AlbumGallery>> albums;
    albums["alice"] = std::make_shared<store::AlbumGallery>(dir / "alice", dims, "alice");
    albums["bob"] = std::make_shared<store::AlbumGallery>(dir / "bob", dims, "bob");

    SplitMix64 rng(4);
    std::vector<std::pair<std::string, Representation>> alice_items;
    for (int i = 0; i < 12; ++i) {
        auto rep = random_representation(rng, dims);
        const auto id = albums["alice"]->ingest_item("alice/" + std::to_string(i) + ".jpg", rep);
        alice_items.emplace_back(id, std::move(rep));
    }
    RequestCenter center({nullptr, &chat, &encoder, nullptr}, {}, nullptr, nullptr, sessions);
    center.set_album_resolver([&](std::string_view owner) -> std::shared_ptr<store::AlbumGallery> {
        const auto it = albums.find(std::string(owner));
        return it == albums.end() ? nullptr : it->second;
    });

    encoder.plant(Payload::text("my cat"), alice_items[7].second);
    const auto r = center.text_to_image("my cat", GalleryMode::Album, 5, "alice");
    ASSERT_EQ(r.hits.size(), 5u);
    EXPECT_EQ(r.hits[0].item_id, alice_items[7].first);
    EXPECT_EQ(r.hits[0].uri, "alice/7.jpg");
    EXPECT_EQ(r.hits[0].score, 1.0);
    const auto expected = brute_force_rank(alice_items[7].second, alice_items, 5, {});
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(r.hits[j].item_id, expected[j].item_id);

    EXPECT_EQ(code_of([&] { center.text_to_image("my cat", GalleryMode::Album, 5, "bob"); }), ErrorCode::EmptyGallery);
    EXPECT_EQ(code_of([&] { center.text_to_image("my cat", GalleryMode::Album, 5, "carol"); }), ErrorCode::EmptyGallery);
}

// --- google_mode_search ------------------------------------------------------

/// Representations whose fused score against `axis_rep(0)` is cos(theta):
/// the global vector and every local row are (cos theta, sin theta, 0...).
Representation axis_rep(double theta, const Dims& dims) {
    Representation r;
    r.global.assign(dims.global, 0.0f);
    r.global[0] = static_cast<float>(std::cos(theta));
    r.global[1] = static_cast<float>(std::sin(theta));
    r.local_dim = dims.local;
    r.locals.assign(dims.local_values(), 0.0f);
    for (std::size_t row = 0; row < dims.locals_per_item; ++row) {
        r.locals[row * dims.local] = static_cast<float>(std::cos(theta));
        r.locals[row * dims.local + 1] = static_cast<float>(std::sin(theta));
    }
    return r;
}

struct WebFixture : ::testing::Test {
    Dims dims{16, 8, 4};
    MockChatProvider chat;
    MockEncoder encoder{dims};
    MockWebSearch search;
    request::InMemorySessionStore sessions;
    std::unique_ptr<RequestCenter> center;

    void SetUp() override {
        chat.set_responder(cooperative_llm);
        center = std::make_unique<RequestCenter>(request::ProviderSet{nullptr, &chat, &encoder, &search},
                                                 request::RequestConfig{}, nullptr, nullptr, sessions);
    }

    /// One result per angle; source ranks follow the vector order.
    void serve(const std::string& query, const std::vector<double>& angles) {
        encoder.plant(Payload::text(query), axis_rep(0.0, dims));
        std::vector<WebSearchResult> results;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const auto thumb = fake_jpeg(500 + i);
            encoder.plant(Payload::image(thumb), axis_rep(angles[i], dims));
            results.push_back({"https://img.example/" + std::to_string(i + 1) + ".jpg", thumb,
                               "result " + std::to_string(i + 1), i + 1});
        }
        search.set_results(std::move(results));
    }
};

TEST_F(WebFixture, OffTopicTopResultIsDemotedToNineteenth) {
    // source rank 1 is off-topic; 2..19 are on-topic; 20..40 are further off
    std::vector<double> angles(40);
    angles[0] = 1.1;
    for (std::size_t i = 1; i < 19; ++i) angles[i] = 0.05 + 0.02 * static_cast<double>(i);
    for (std::size_t i = 19; i < 40; ++i) angles[i] = 1.2 + 0.01 * static_cast<double>(i);
    serve("a horse on the beach", angles);

    const auto r = center->google_mode_search("a horse on the beach");
    ASSERT_EQ(r.hits.size(), 40u);
    EXPECT_EQ(search.requests().at(0).count, 40u);
    EXPECT_EQ(search.requests().at(0).query, "a horse on the beach");
    const auto it = std::find_if(r.hits.begin(), r.hits.end(), [](const auto& h) { return h.source_rank == 1; });
    ASSERT_NE(it, r.hits.end());
    EXPECT_EQ(it->rank, 19u);
    EXPECT_EQ(it->item_id, "web-1");
    EXPECT_NEAR(it->score, std::cos(1.1), 1e-6);
    for (std::size_t i = 0; i < 18; ++i) EXPECT_EQ(r.hits[i].source_rank, i + 2);
}

TEST_F(WebFixture, TiesKeepSourceOrderAndUnscorableGoLast) {
    std::vector<double> angles{0.3, 0.3, 0.1, 0.3, 0.2};
    serve("three dogs", angles);
    // duplicate the thumbnail of rank 1 into rank 2 so the scores are bit-identical
    std::vector<WebSearchResult> served;
    for (std::size_t i = 0; i < angles.size(); ++i)
        served.push_back({"u" + std::to_string(i + 1), fake_jpeg(500 + (i == 1 ? 0 : i)), "t", i + 1});
    served.push_back({"u6", std::nullopt, "no thumbnail", 6});
    served.push_back({"u7", std::string("GIF89a-not-supported"), "gif", 7});
    served.push_back({"u8", std::nullopt, "no thumbnail", 8});
    search.set_results(served);

    const auto r = center->google_mode_search("three dogs");
    std::vector<std::size_t> order;
    for (const auto& h : r.hits) order.push_back(h.source_rank);
    EXPECT_EQ(order, (std::vector<std::size_t>{3, 5, 1, 2, 4, 6, 7, 8}));
    EXPECT_EQ(r.hits[2].score, r.hits[3].score);
    for (std::size_t i = 5; i < 8; ++i) EXPECT_EQ(r.hits[i].score, request::kUnscorable);
}

TEST_F(WebFixture, ProviderOutcomes) {
    search.set_results({});
    EXPECT_EQ(code_of([&] { center->google_mode_search("cats"); }), ErrorCode::NoResults);
    search.set_unavailable(true);
    EXPECT_EQ(code_of([&] { center->google_mode_search("cats"); }), ErrorCode::ProviderUnavailable);
    search.set_unavailable(false);
    search.set_quota_exceeded(true);
    EXPECT_EQ(code_of([&] { center->google_mode_search("cats"); }), ErrorCode::QuotaExceeded);
    EXPECT_EQ(code_of([&] { center->google_mode_search(""); }), ErrorCode::EmptyText);
}

TEST_F(WebFixture, WebModeTruncatesToK) {
    serve("a kite", std::vector<double>(30, 0.4));
    const auto r = center->text_to_image("a kite", GalleryMode::Web, 7);
    ASSERT_EQ(r.hits.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(r.hits[i].source_rank, i + 1);
}

TEST_F(WebFixture, ForeignQueryIsSearchedInEnglish) {
    serve("a man riding a horse", {0.1, 0.2});
    const auto r = center->google_mode_search("一个男人在骑马");
    EXPECT_TRUE(r.query.was_translated);
    EXPECT_EQ(search.requests().back().query, "a man riding a horse");
}

TEST_F(WebFixture, FuzzedResponsesArePermutations) {
    SplitMix64 rng(77);
    for (int run = 0; run < 150; ++run) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<WebSearchResult> served;
        std::vector<double> angles;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t kind = rng.below(10);
            std::optional<std::string> thumb;
            if (kind == 0) {
                thumb = std::nullopt;
            } else if (kind == 1) {
                thumb = "not an image";
            } else {
                thumb = fake_jpeg(rng.below(8) + 10000 * static_cast<std::uint64_t>(run + 1));
                encoder.plant(Payload::image(*thumb), axis_rep(rng.uniform(0.0f, 3.0f), dims));
            }
            served.push_back({"u" + std::to_string(i), thumb, "t", i + 1});
        }
        // shuffle the wire order; the provider contract restores rank order
        for (std::size_t i = n; i > 1; --i) std::swap(served[i - 1], served[rng.below(i)]);
        search.set_results(served);
        encoder.plant(Payload::text("query"), axis_rep(0.0, dims));

        const auto r = center->google_mode_search("query");
        ASSERT_EQ(r.hits.size(), n);
        std::vector<std::size_t> ranks;
        for (std::size_t i = 0; i < n; ++i) {
            ranks.push_back(r.hits[i].source_rank);
            EXPECT_EQ(r.hits[i].rank, i + 1);
            if (i) {
                EXPECT_GE(r.hits[i - 1].score, r.hits[i].score);
                if (r.hits[i - 1].score == r.hits[i].score) {
                    EXPECT_LT(r.hits[i - 1].source_rank, r.hits[i].source_rank);
                }
            }
        }
        std::sort(ranks.begin(), ranks.end());
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(ranks[i], i + 1);
    }
}

// --- describe_images ---------------------------------------------------------

TEST(DescribeImages, PlantedPoolEntryAndArgmaxOracle) {
    const Dims dims{16, 8, 4};
    TempDir dir;
    SplitMix64 rng(42);
    store::StoreWriter writer(dims);
    std::vector<std::pair<std::string, Representation>> pool;
    for (int i = 0; i < 1000; ++i) {
        pool.emplace_back("p" + std::to_string(i), random_representation(rng, dims));
        writer.add_description({pool.back().first, "caption " + std::to_string(i), std::nullopt}, pool.back().second);
    }
    const auto store = store::RepresentationStore::open_pool(writer.write(dir.path(), false));
    MockChatProvider chat;
    MockEncoder encoder(dims, 3);
    request::InMemorySessionStore sessions;
    RequestCenter center({nullptr, &chat, &encoder, nullptr}, {}, nullptr, store, sessions);

    const auto planted = fake_png(42);
    encoder.plant(Payload::image(planted), pool[42].second);
    std::vector<std::string> images{planted};
    for (std::uint64_t s = 0; s < 12; ++s) images.push_back(fake_jpeg(s));
    const auto out = center.describe_images(images);
    ASSERT_EQ(out.size(), images.size());
    EXPECT_EQ(out[0].id, "p42");
    EXPECT_EQ(out[0].text, "caption 42");
    EXPECT_EQ(out[0].score, 1.0);
    for (std::size_t i = 1; i < images.size(); ++i) {
        const auto best = brute_force_rank(encoder.generated(Payload::image(images[i])), pool, 1, {});
        EXPECT_EQ(out[i].id, best[0].item_id);
        EXPECT_EQ(out[i].score, best[0].score);
    }
    EXPECT_EQ(code_of([&] { center.describe_images({fake_jpeg(1), "junk"}); }), ErrorCode::UnsupportedPayload);
}

// --- chat_turn ---------------------------------------------------------------

struct ChatFixture : ::testing::Test {
    Universe u = make_universe(11, 10, 30);
    MockChatProvider chat;
    MockEncoder encoder{u.dims};
    request::InMemorySessionStore sessions;
    std::unique_ptr<RequestCenter> center;

    void SetUp() override {
        center = std::make_unique<RequestCenter>(request::ProviderSet{nullptr, &chat, &encoder, nullptr},
                                                 request::RequestConfig{}, u.store, nullptr, sessions);
    }
    std::string image_for(std::size_t description) {
        const auto bytes = fake_jpeg(7000 + description);
        encoder.plant(Payload::image(bytes), u.descriptions[description].second);
        return bytes;
    }
};

TEST_F(ChatFixture, EchoedReplyContainsDescriptions) {
    const auto s = center->create_session();
    const auto r = center->chat_turn(s.id, "What is in these pictures?", {image_for(4), image_for(9)});
    EXPECT_EQ(r.attached_descriptions, (std::vector<std::string>{"caption number 4", "caption number 9"}));
    EXPECT_NE(r.reply.find("Image 1: caption number 4"), std::string::npos);
    EXPECT_NE(r.reply.find("Image 2: caption number 9"), std::string::npos);
    const auto stored = center->session(s.id);
    ASSERT_EQ(stored.turns.size(), 2u);
    EXPECT_EQ(stored.turns[1].content, r.reply);
    EXPECT_EQ(stored.attached_descriptions.size(), 1u);
}

TEST_F(ChatFixture, ThreeImagesGiveThreeLines) {
    const auto s = center->create_session();
    center->chat_turn(s.id, "Tell a story.", {image_for(1), image_for(2), image_for(3)});
    const auto user = chat.calls().back().back().content;
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = user.find("Image ", pos)) != std::string::npos; ++pos)
        if (pos == 0 || user[pos - 1] == '\n') ++lines;
    EXPECT_EQ(lines, 3u);
    EXPECT_EQ(chat.calls().back().front().role, Role::System);
    EXPECT_NE(chat.calls().back().front().content.find(request::prompts::kImageInstruction), std::string::npos);
}

TEST_F(ChatFixture, FailureLeavesSessionByteIdentical) {
    const auto s = center->create_session("alice");
    center->chat_turn(s.id, "first", {image_for(0)}, "alice");
    const auto before = request::to_json(center->session(s.id, "alice")).dump();

    chat.fail_calls(ErrorCode::ProviderUnavailable, 1);
    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "second", {image_for(1)}, "alice"); }),
              ErrorCode::ProviderUnavailable);
    EXPECT_EQ(request::to_json(center->session(s.id, "alice")).dump(), before);

    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "third", {"not an image"}, "alice"); }),
              ErrorCode::UnsupportedPayload);
    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "  ", {}, "alice"); }), ErrorCode::EmptyText);
    chat.set_responder([](const std::vector<ChatMessage>&) -> std::string {
        throw Error(ErrorCode::MalformedResponse, "garbled");
    });
    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "fourth", {}, "alice"); }), ErrorCode::MalformedResponse);
    EXPECT_EQ(request::to_json(center->session(s.id, "alice")).dump(), before);
}

TEST_F(ChatFixture, SessionsAreScopedToOwners) {
    const auto s = center->create_session("alice");
    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "hi", {}, "bob"); }), ErrorCode::UnknownSession);
    EXPECT_EQ(code_of([&] { center->chat_turn(s.id, "hi", {}); }), ErrorCode::UnknownSession);
    EXPECT_EQ(code_of([&] { center->chat_turn("nope", "hi", {}, "alice"); }), ErrorCode::UnknownSession);
    EXPECT_EQ(chat.call_count(), 0u);
    EXPECT_EQ(s.id.size(), 32u);
    EXPECT_NE(center->create_session().id, s.id);
}

TEST_F(ChatFixture, HistoryWindowForwardsTheLatestTwenty) {
    const auto s = center->create_session();
    for (int i = 0; i < 15; ++i) center->chat_turn(s.id, "message " + std::to_string(i), {});
    const auto last = chat.calls().back();
    ASSERT_EQ(last.size(), 1u + 20u + 1u);
    EXPECT_EQ(last[1].role, Role::User);
    EXPECT_EQ(last[1].content, "message 4");
    EXPECT_EQ(last.back().content, "message 14");
    for (std::size_t i = 1; i + 1 < last.size(); ++i)
        EXPECT_EQ(last[i].role, i % 2 ? Role::User : Role::Assistant);
    EXPECT_EQ(center->session(s.id).turns.size(), 30u);
}

TEST_F(ChatFixture, ImageNumberingContinuesAcrossTurns) {
    const auto s = center->create_session();
    center->chat_turn(s.id, "one", {image_for(0), image_for(1)});
    center->chat_turn(s.id, "two", {image_for(2)});
    const auto user = chat.calls().back().back().content;
    EXPECT_EQ(user, "Image 3: caption number 2\n\ntwo");
    EXPECT_EQ(center->session(s.id).image_count(), 3u);
}

TEST_F(ChatFixture, SessionJsonRoundTrips) {
    const auto s = center->create_session("alice");
    center->chat_turn(s.id, "κάτι", {image_for(5)}, "alice");
    center->chat_turn(s.id, "more \"quoted\"\nlines", {}, "alice");
    const auto stored = center->session(s.id, "alice");
    EXPECT_EQ(request::session_from_json(nlohmann::json::parse(request::to_json(stored).dump())), stored);
    EXPECT_EQ(code_of([] { request::session_from_json(nlohmann::json::parse(R"({"id":3})")); }), ErrorCode::Internal);
}

TEST_F(ChatFixture, ConcurrentTurnsAreSerialized) {
    // echoing the whole prompt would grow geometrically with the history
    chat.set_responder([](const std::vector<ChatMessage>& msgs) { return "re: " + msgs.back().content; });
    const auto s = center->create_session();
    constexpr int kThreads = 6, kTurns = 8;
    {
        std::vector<std::jthread> workers;
        for (int t = 0; t < kThreads; ++t)
            workers.emplace_back([&, t] {
                for (int i = 0; i < kTurns; ++i)
                    center->chat_turn(s.id, "t" + std::to_string(t) + " m" + std::to_string(i), {});
            });
    }
    const auto stored = center->session(s.id);
    ASSERT_EQ(stored.turns.size(), 2u * kThreads * kTurns);
    for (std::size_t i = 0; i < stored.turns.size(); ++i)
        EXPECT_EQ(stored.turns[i].role, i % 2 ? Role::Assistant : Role::User);
    // every reply answers the question stored just before it
    for (std::size_t i = 0; i < stored.turns.size(); i += 2)
        EXPECT_EQ(stored.turns[i + 1].content, "re: " + stored.turns[i].content);
}

TEST(PromptGolden, ReplaysMatchCheckedInFiles) {
    for (const auto& scenario : prompt_scenarios()) {
        SCOPED_TRACE(scenario.golden_file);
        TempDir dir;
        const auto golden = read_file(std::filesystem::path(XMODAL_GOLDEN_DIR) / scenario.golden_file);
        ASSERT_FALSE(golden.empty());
        const auto first = replay_scenario(scenario, dir / "a");
        EXPECT_EQ(first, golden);
        EXPECT_EQ(replay_scenario(scenario, dir / "b"), first);
    }
}

}  // namespace
}  // namespace xmodal
