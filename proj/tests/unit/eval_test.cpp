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

#include "support/ranking_oracle.hpp"
#include "support/test_support.hpp"
#include "xmodal/eval/benchmark.hpp"
#include "xmodal/eval/metrics.hpp"
#include "xmodal/eval/report.hpp"
#include "xmodal/eval/synthetic.hpp"

namespace xmodal::eval {
namespace {

using xmodal::testing::TempDir;
using xmodal::testing::write_file;

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

/// Query q<n> ranks ten filler ids with its single relevant item r<n>
/// placed at the given 1-based position (0: absent).
Rankings rankings_with_hits(const std::vector<std::size_t>& positions, Judgments& judgments) {
    Rankings out;
    for (std::size_t q = 0; q < positions.size(); ++q) {
        const std::string qid = "q" + std::to_string(q), rel = "r" + std::to_string(q);
        judgments[qid] = {rel};
        Ranking r{qid, {}};
        for (std::size_t i = 1; i <= 12; ++i) r.ranked_ids.push_back(i == positions[q] ? rel : "x" + std::to_string(i));
        out.push_back(std::move(r));
    }
    return out;
}

/// Straight recount with nested loops over plain vectors.
double naive_recall(const Rankings& rankings, const Judgments& judgments, std::size_t k) {
    if (rankings.empty()) return 0.0;
    int hits = 0;
    for (const auto& r : rankings) {
        const std::vector<std::string> relevant(judgments.at(r.query_id).begin(), judgments.at(r.query_id).end());
        bool hit = false;
        for (std::size_t i = 0; i < r.ranked_ids.size() && i < k; ++i)
            for (const auto& rel : relevant) hit = hit || r.ranked_ids[i] == rel;
        hits += hit;
    }
    return 100.0 * hits / static_cast<double>(rankings.size());
}

TEST(RecallAtK, FirstHitsAtOneTwoSixEleven) {
    Judgments j;
    const auto r = rankings_with_hits({1, 2, 6, 11}, j);
    EXPECT_EQ(recall_at_k(r, j, 1), 25.0);
    EXPECT_EQ(recall_at_k(r, j, 5), 50.0);
    EXPECT_EQ(recall_at_k(r, j, 10), 75.0);
    EXPECT_EQ(recall_at_k(r, j, 11), 100.0);
}

TEST(RecallAtK, AllAtRankOne) {
    Judgments j;
    const auto r = rankings_with_hits(std::vector<std::size_t>(9, 1), j);
    EXPECT_EQ(recall_at_k(r, j, 1), 100.0);
}

TEST(RecallAtK, Errors) {
    Judgments j;
    auto r = rankings_with_hits({1, 3}, j);
    EXPECT_EQ(code_of([&] { recall_at_k(r, j, 0); }), ErrorCode::InvalidArgument);
    j.erase("q1");
    EXPECT_EQ(code_of([&] { recall_at_k(r, j, 5); }), ErrorCode::MissingJudgment);
    j["q1"] = {};
    EXPECT_EQ(code_of([&] { recall_at_k(r, j, 5); }), ErrorCode::MissingJudgment);
    EXPECT_EQ(recall_at_k({}, j, 5), 0.0);
}

TEST(RecallAtK, MatchesNaiveRecountOnRandomFixtures) {
    SplitMix64 rng(100);
    for (int f = 0; f < 100; ++f) {
        Judgments j;
        Rankings rankings;
        const std::size_t queries = 1 + rng.below(60), items = 5 + rng.below(40);
        for (std::size_t q = 0; q < queries; ++q) {
            const std::string qid = "q" + std::to_string(q);
            const std::size_t nrel = 1 + rng.below(3);
            for (std::size_t i = 0; i < nrel; ++i) j[qid].insert("it" + std::to_string(rng.below(items)));
            Ranking r{qid, {}};
            const std::size_t depth = rng.below(items);
            for (std::size_t i = 0; i < depth; ++i) r.ranked_ids.push_back("it" + std::to_string(rng.below(items)));
            rankings.push_back(std::move(r));
        }
        double prev = 0.0;
        for (std::size_t k : {1, 2, 5, 10, 20, 100}) {
            const double got = recall_at_k(rankings, j, k);
            EXPECT_DOUBLE_EQ(got, naive_recall(rankings, j, k));
            EXPECT_GE(got, prev);
            EXPECT_LE(got, 100.0);
            prev = got;
        }
        auto shuffled = rankings;
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        for (std::size_t k : {1, 5, 10}) EXPECT_EQ(recall_at_k(shuffled, j, k), recall_at_k(rankings, j, k));
    }
}

// --- description matching ----------------------------------------------------

TEST(TokenF1, HandCountedExample) {
    // precision 3/4, recall 3/5
    EXPECT_NEAR(token_f1("a black dog runs", "a black dog is running"), 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(description_match_score("a black dog runs", {"a black dog is running"}), 2.0 / 3.0, 1e-9);
}

TEST(TokenF1, IdentityZeroOverlapAndNormalization) {
    EXPECT_EQ(token_f1("two zebras grazing", "two zebras grazing"), 1.0);
    EXPECT_EQ(token_f1("Two Zebras, grazing!", "two zebras grazing"), 1.0);
    EXPECT_EQ(token_f1("a cat", "the dog"), 0.0);
    EXPECT_EQ(token_f1("", "the dog"), 0.0);
    EXPECT_EQ(token_f1("...", "!!"), 1.0);
    // repeated tokens only match as often as they occur in the reference
    EXPECT_NEAR(token_f1("dog dog dog", "dog"), 2.0 * (1.0 / 3.0) * 1.0 / (1.0 / 3.0 + 1.0), 1e-12);
    EXPECT_EQ(metric_tokens("Ein Hund läuft"), (std::vector<std::string>{"ein", "hund", "läuft"}));
}

TEST(DescriptionMatch, MaxOverReferencesAndErrors) {
    const std::vector<std::string> refs{"the dog", "a man riding a horse", "a man on a horse"};
    EXPECT_EQ(description_match_score("a man riding a horse", refs), 1.0);
    EXPECT_NEAR(description_match_score("a man riding", refs), 2.0 * 1.0 * 0.6 / 1.6, 1e-12);
    EXPECT_EQ(description_match_score("zzz", refs), 0.0);
    EXPECT_EQ(code_of([] { description_match_score("x", {}); }), ErrorCode::EmptyReferences);

    const TextMetric exact = [](std::string_view a, std::string_view b) { return a == b ? 1.0 : 0.0; };
    EXPECT_EQ(description_match_score("the dog", refs, exact), 1.0);
    EXPECT_EQ(description_match_score("The dog", refs, exact), 0.0);
    const TextMetric broken = [](std::string_view, std::string_view) { return 1.5; };
    EXPECT_EQ(code_of([&] { description_match_score("x", refs, broken); }), ErrorCode::InvalidArgument);

    EXPECT_NEAR(mean_description_match({{"a man riding a horse", refs}, {"zzz", refs}}), 0.5, 1e-12);
    EXPECT_EQ(mean_description_match({}), 0.0);
}

TEST(DescriptionMatch, BoundedAndIdentityOnRandomText) {
    SplitMix64 rng(9);
    const char* words[] = {"a", "dog", "cat", "on", "the", "red", "bus", "Runs", "runs", "snow", "x1"};
    auto sentence = [&] {
        std::string s;
        for (std::size_t i = 0, n = rng.below(8); i < n; ++i) s += std::string(words[rng.below(11)]) + " ";
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        const auto a = sentence(), b = sentence();
        const double v = token_f1(a, b);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_DOUBLE_EQ(v, token_f1(b, a));
        EXPECT_EQ(token_f1(a, a), 1.0);
    }
}

// --- benchmark ---------------------------------------------------------------

TEST(Benchmark, PlantedOptimumGivesFullRecall) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 120, .descriptions_per_image = 1, .dims = {32, 8, 4},
                                                      .noise = 0.0f, .seed = 3});
    const auto store = store::RepresentationStore::open(f.manifest);
    const auto r = run_benchmark(*store, f.judgments);
    for (Direction dir : kDirections) {
        ASSERT_EQ(r[dir].rows.size(), 3u);
        EXPECT_EQ(r[dir].query_count, 120u);
        for (const auto& row : r[dir].rows) EXPECT_EQ(row.recall, 100.0) << to_string(dir) << " R@" << row.k;
    }
}

TEST(Benchmark, PlantedPessimumGivesZeroRecallAtTen) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 20, .dims = {32, 8, 4}, .noise = 1.0f, .seed = 4});
    const auto store = store::RepresentationStore::open(f.manifest);
    std::vector<std::pair<std::string, Representation>> images, descriptions;
    for (std::size_t i = 0; i < 20; ++i) {
        images.emplace_back("i" + std::to_string(i), store->get_representation("i" + std::to_string(i), ItemKind::Image));
        descriptions.emplace_back("d" + std::to_string(i),
                                  store->get_representation("d" + std::to_string(i), ItemKind::Description));
    }
    // judge each query's worst match as its only relevant item
    RelevanceJudgments j;
    for (const auto& [id, rep] : descriptions) j.text_to_image[id] = {xmodal::testing::brute_force_rank(rep, images, 20, {}).back().item_id};
    for (const auto& [id, rep] : images) j.image_to_text[id] = {xmodal::testing::brute_force_rank(rep, descriptions, 20, {}).back().item_id};
    const auto r = run_benchmark(*store, j, {.ks = {1, 5, 10, 19, 20}});
    for (Direction dir : kDirections) {
        EXPECT_EQ(r[dir].rows[2].recall, 0.0);
        EXPECT_EQ(r[dir].rows[3].recall, 0.0);
        EXPECT_EQ(r[dir].rows[4].recall, 100.0);
    }
}

TEST(Benchmark, RandomStoreMatchesBruteForce) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 250, .descriptions_per_image = 2, .dims = {24, 6, 5},
                                                      .noise = 1.5f, .seed = 5});
    const auto store = store::RepresentationStore::open(f.manifest);
    const BenchmarkConfig cfg{.ks = {10, 1, 5}, .scorer = {0.7}};
    const auto r = run_benchmark(*store, f.judgments, cfg);

    for (Direction dir : kDirections) {
        std::vector<std::pair<std::string, Representation>> targets;
        for (std::size_t i = 0; i < store->count(target_kind(dir)); ++i) {
            const std::string id(store->id_at(target_kind(dir), i));
            targets.emplace_back(id, store->get_representation(id, target_kind(dir)));
        }
        Rankings expected;
        for (const auto& [q, rel] : f.judgments[dir]) {
            Ranking rk{q, {}};
            for (const auto& hit : xmodal::testing::brute_force_rank(store->get_representation(q, query_kind(dir)), targets, 10, cfg.scorer))
                rk.ranked_ids.push_back(hit.item_id);
            expected.push_back(std::move(rk));
        }
        ASSERT_EQ(r[dir].rows.size(), 3u);
        EXPECT_EQ(r[dir].rows[0].k, 1u);
        for (const auto& row : r[dir].rows) EXPECT_DOUBLE_EQ(row.recall, naive_recall(expected, f.judgments[dir], row.k));
        EXPECT_LE(r[dir].rows[0].recall, r[dir].rows[1].recall);
        EXPECT_LE(r[dir].rows[1].recall, r[dir].rows[2].recall);
    }
    EXPECT_EQ(r.text_to_image.query_count, 500u);
    EXPECT_EQ(r.image_to_text.query_count, 250u);
}

TEST(Benchmark, HeldOutQueryStore) {
    TempDir dir;
    const auto base = write_synthetic_store(dir / "base", {.images = 30, .dims = {16, 4, 4}, .noise = 0.0f, .seed = 6});
    // same seed, same images; the query store's captions are exact copies
    const auto held = write_synthetic_store(dir / "held", {.images = 30, .dims = {16, 4, 4}, .noise = 0.0f, .seed = 6});
    const auto store = store::RepresentationStore::open(base.manifest);
    const auto queries = store::RepresentationStore::open(held.manifest);
    const auto r = run_benchmark(*store, base.judgments, {}, queries.get());
    EXPECT_EQ(r.text_to_image.rows[0].recall, 100.0);

    const auto other = write_synthetic_store(dir / "other", {.images = 3, .dims = {8, 4, 4}, .seed = 1});
    const auto mismatched = store::RepresentationStore::open(other.manifest);
    EXPECT_EQ(code_of([&] { run_benchmark(*store, base.judgments, {}, mismatched.get()); }), ErrorCode::DimMismatch);
}

TEST(Benchmark, ValidatesJudgmentsAndConfig) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 5, .dims = {8, 4, 2}});
    const auto store = store::RepresentationStore::open(f.manifest);
    auto j = f.judgments;
    j.text_to_image["d0"].insert("i99");
    EXPECT_EQ(code_of([&] { run_benchmark(*store, j); }), ErrorCode::UnknownItem);
    j = f.judgments;
    j.image_to_text["ghost"] = {"d0"};
    EXPECT_EQ(code_of([&] { run_benchmark(*store, j); }), ErrorCode::UnknownItem);
    j = f.judgments;
    j.text_to_image["d1"].clear();
    EXPECT_EQ(code_of([&] { run_benchmark(*store, j); }), ErrorCode::MissingJudgment);
    EXPECT_EQ(code_of([&] { run_benchmark(*store, f.judgments, {.ks = {}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { run_benchmark(*store, f.judgments, {.ks = {0, 5}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { run_benchmark(*store, f.judgments, {.scorer = {1.5}}); }), ErrorCode::InvalidArgument);

    RelevanceJudgments only_t2i;
    only_t2i.text_to_image = f.judgments.text_to_image;
    const auto r = run_benchmark(*store, only_t2i);
    EXPECT_EQ(r.image_to_text.query_count, 0u);
    EXPECT_EQ(r.image_to_text.rows[0].recall, 0.0);
}

TEST(Judgments, FromLinksAndJsonRoundTrip) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 4, .descriptions_per_image = 3, .dims = {8, 4, 2}});
    EXPECT_EQ(f.judgments.text_to_image.size(), 12u);
    EXPECT_EQ(f.judgments.image_to_text.size(), 4u);
    EXPECT_EQ(f.judgments.image_to_text.at("i1"), (std::set<std::string>{"d3", "d4", "d5"}));
    EXPECT_EQ(f.judgments.text_to_image.at("d5"), (std::set<std::string>{"i1"}));

    const auto loaded = load_judgments(f.judgments_file);
    EXPECT_EQ(loaded.text_to_image, f.judgments.text_to_image);
    EXPECT_EQ(loaded.image_to_text, f.judgments.image_to_text);

    EXPECT_EQ(code_of([] { judgments_from_json(nlohmann::json::parse(R"([1])")); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { judgments_from_json(nlohmann::json::parse(R"({"sideways":{}})")); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { judgments_from_json(nlohmann::json::parse(R"({"text_to_image":{"d0":"i0"}})")); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { judgments_from_json(nlohmann::json::parse(R"({"text_to_image":{"d0":[3]}})")); }),
              ErrorCode::InvalidArgument);
    write_file(dir / "bad.json", "{not json");
    EXPECT_EQ(code_of([&] { load_judgments(dir / "bad.json"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { load_judgments(dir / "absent.json"); }), ErrorCode::MissingFile);
}

// --- latency -----------------------------------------------------------------

TEST(Latency, SummaryStatistics) {
    std::vector<double> v;
    for (int i = 1; i <= 20; ++i) v.push_back(i);
    auto s = summarize(v);
    EXPECT_EQ(s.count, 20u);
    EXPECT_EQ(s.mean, 10.5);
    EXPECT_EQ(s.median, 10.5);
    EXPECT_EQ(s.p95, 19.0);
    s = summarize({3.0, 1.0, 2.0});
    EXPECT_EQ(s.median, 2.0);
    EXPECT_EQ(s.p95, 3.0);
    s = summarize({});
    EXPECT_EQ(s.count, 0u);
    EXPECT_EQ(s.mean, 0.0);
}

TEST(Latency, EmptyQueriesGiveAnEmptyReport) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 5, .dims = {8, 4, 2}});
    const auto store = store::RepresentationStore::open(f.manifest);
    const auto r = time_retrieval(*store, {}, 5);
    EXPECT_TRUE(r.samples.empty());
    EXPECT_EQ(r.total.count, 0u);
    EXPECT_EQ(r.total.mean, 0.0);
    EXPECT_FALSE(r.hardware.empty());
    EXPECT_NE(to_text(r).find("hardware:"), std::string::npos);
}

TEST(Latency, SampleCountAndFields) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 300, .dims = {32, 8, 4}});
    const auto store = store::RepresentationStore::open(f.manifest);
    const QuerySet qs{Direction::ImageToText, {"i0", "i1", "i2", "i3", "i4", "i5", "i6"}};
    const auto r = time_retrieval(*store, qs, 4, {.k = 5});
    ASSERT_EQ(r.samples.size(), 7u * 4u);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        EXPECT_EQ(r.samples[i].repetition, i / 7);
        EXPECT_EQ(r.samples[i].query_id, qs.ids[i % 7]);
        EXPECT_GE(r.samples[i].lookup_seconds, 0.0);
        EXPECT_GT(r.samples[i].scoring_seconds, 0.0);
    }
    EXPECT_EQ(r.item_count, 300u);
    EXPECT_EQ(r.total.count, 28u);
    EXPECT_LE(r.total.median, r.total.p95);
    EXPECT_NEAR(r.total.mean, r.lookup.mean + r.scoring.mean, 1e-12);

    const auto j = to_json(r);
    EXPECT_EQ(j["samples"].size(), 28u);
    EXPECT_EQ(j["direction"], "image_to_text");
    EXPECT_TRUE(j["scoring"].contains("p95_s"));
    EXPECT_FALSE(to_json(r, false).contains("samples"));
    EXPECT_EQ(code_of([&] { time_retrieval(*store, {Direction::ImageToText, {"d0"}}, 1); }), ErrorCode::UnknownItem);
}

TEST(Latency, MediansAreStableAcrossRuns) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 4000, .dims = {256, 4, 4}, .seed = 8});
    const auto store = store::RepresentationStore::open(f.manifest);
    QuerySet qs{Direction::TextToImage, {}};
    for (int i = 0; i < 10; ++i) qs.ids.push_back("d" + std::to_string(i));
    const LatencyConfig cfg{.k = 10, .scorer = {1.0}, .rank = {.threads = 1}};
    std::vector<double> medians;
    for (int run = 0; run < 3; ++run) medians.push_back(time_retrieval(*store, qs, 5, cfg).scoring.median);
    const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
    EXPECT_LE(*hi, *lo * 1.2) << "medians " << medians[0] << " " << medians[1] << " " << medians[2];
}

TEST(QueryFile, ParsesAndRejects) {
    const auto qs = query_set_from_json(nlohmann::json::parse(R"({"direction":"image_to_text","queries":["i1","i2"]})"));
    EXPECT_EQ(qs.direction, Direction::ImageToText);
    EXPECT_EQ(qs.ids, (std::vector<std::string>{"i1", "i2"}));
    EXPECT_EQ(query_set_from_json(to_json(qs)).ids, qs.ids);
    EXPECT_EQ(query_set_from_json(nlohmann::json::parse(R"({"queries":[]})")).direction, Direction::TextToImage);
    EXPECT_EQ(code_of([] { query_set_from_json(nlohmann::json::parse(R"({"queries":"d0"})")); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { query_set_from_json(nlohmann::json::parse(R"({"direction":"up","queries":[]})")); }),
              ErrorCode::InvalidArgument);
}

TEST(Report, TextAndJsonShapes) {
    TempDir dir;
    const auto f = write_synthetic_store(dir.path(), {.images = 10, .dims = {8, 4, 2}, .noise = 0.0f});
    const auto store = store::RepresentationStore::open(f.manifest);
    const auto r = run_benchmark(*store, f.judgments);
    const auto text = to_text(r);
    EXPECT_NE(text.find("direction"), std::string::npos);
    EXPECT_NE(text.find("R@10"), std::string::npos);
    EXPECT_NE(text.find("text_to_image         10       10   100.00   100.00   100.00"), std::string::npos) << text;
    const auto j = to_json(r);
    ASSERT_EQ(j["tables"].size(), 2u);
    EXPECT_EQ(j["tables"][1]["direction"], "image_to_text");
    EXPECT_EQ(j["tables"][0]["rows"][2]["k"], 10);
    EXPECT_EQ(j["tables"][0]["rows"][2]["recall"], 100.0);
}

}  // namespace
}  // namespace xmodal::eval
