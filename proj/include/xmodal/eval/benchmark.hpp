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
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/eval/metrics.hpp"
#include "xmodal/similarity/rank.hpp"
#include "xmodal/store/representation_store.hpp"

namespace xmodal::eval {

enum class Direction { TextToImage, ImageToText };

inline constexpr std::array kDirections = {Direction::TextToImage, Direction::ImageToText};

inline std::string_view to_string(Direction d) {
    return d == Direction::TextToImage ? "text_to_image" : "image_to_text";
}

inline Direction parse_direction(std::string_view s) {
    if (s == "text_to_image") return Direction::TextToImage;
    if (s == "image_to_text") return Direction::ImageToText;
    fail(ErrorCode::InvalidArgument, "unknown direction '" + std::string(s) + "'");
}

inline ItemKind query_kind(Direction d) { return d == Direction::TextToImage ? ItemKind::Description : ItemKind::Image; }
inline ItemKind target_kind(Direction d) { return d == Direction::TextToImage ? ItemKind::Image : ItemKind::Description; }

struct RelevanceJudgments {
    Judgments text_to_image;  // description id -> image ids
    Judgments image_to_text;  // image id -> description ids

    Judgments& operator[](Direction d) { return d == Direction::TextToImage ? text_to_image : image_to_text; }
    const Judgments& operator[](Direction d) const {
        return d == Direction::TextToImage ? text_to_image : image_to_text;
    }
};

/// One-to-many judgments read off the store's links: a description is
/// relevant to the image it annotates and the other way round.
inline RelevanceJudgments judgments_from_links(const store::RepresentationStore& store) {
    RelevanceJudgments j;
    for (const auto& d : store.manifest().descriptions) {
        if (!d.image) continue;
        j.text_to_image[d.id].insert(*d.image);
        j.image_to_text[*d.image].insert(d.id);
    }
    return j;
}

/// Fails with UnknownItem if a judgment names an item missing from the
/// store (or from the query store for query ids).
inline void validate_judgments(const RelevanceJudgments& j, const store::RepresentationStore& store,
                               const store::RepresentationStore& queries) {
    for (Direction dir : kDirections) {
        for (const auto& [q, relevant] : j[dir]) {
            if (!queries.row_of(query_kind(dir), q))
                fail(ErrorCode::UnknownItem, std::string(to_string(dir)) + " query '" + q + "' not in store");
            if (relevant.empty()) fail(ErrorCode::MissingJudgment, "query '" + q + "' has no relevant items");
            for (const auto& id : relevant)
                if (!store.row_of(target_kind(dir), id))
                    fail(ErrorCode::UnknownItem, "judged item '" + id + "' for query '" + q + "' not in store");
        }
    }
}

inline nlohmann::json to_json(const RelevanceJudgments& j) {
    nlohmann::json out = nlohmann::json::object();
    for (Direction dir : kDirections) {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [q, ids] : j[dir]) m[q] = std::vector<std::string>(ids.begin(), ids.end());
        out[std::string(to_string(dir))] = std::move(m);
    }
    return out;
}

inline RelevanceJudgments judgments_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) fail(ErrorCode::InvalidArgument, "judgments must be a JSON object");
    RelevanceJudgments j;
    for (const auto& [key, value] : doc.items()) {
        const Direction dir = parse_direction(key);
        if (!value.is_object()) fail(ErrorCode::InvalidArgument, "judgments for " + key + " must be an object");
        for (const auto& [q, ids] : value.items()) {
            if (!ids.is_array()) fail(ErrorCode::InvalidArgument, "judgments for query '" + q + "' must be a list");
            auto& set = j[dir][q];
            for (const auto& id : ids) {
                if (!id.is_string()) fail(ErrorCode::InvalidArgument, "item ids must be strings");
                set.insert(id.get<std::string>());
            }
        }
    }
    return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::MissingFile, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

inline RelevanceJudgments load_judgments(const std::filesystem::path& path) {
    return judgments_from_json(read_json_file(path));
}

// --- recall benchmark --------------------------------------------------------

struct BenchmarkConfig {
    std::vector<std::size_t> ks{1, 5, 10};
    sim::ScorerConfig scorer;
    sim::RankOptions rank;
};

struct RecallRow {
    std::size_t k = 0;
    double recall = 0.0;  // percent
};

struct RecallTable {
    Direction direction = Direction::TextToImage;
    std::size_t query_count = 0;
    std::size_t item_count = 0;
    std::vector<RecallRow> rows;
    double wall_seconds = 0.0;
};

struct BenchmarkResult {
    RecallTable text_to_image;
    RecallTable image_to_text;
    std::string scorer_id;
    double alpha = 0.0;

    const RecallTable& operator[](Direction d) const {
        return d == Direction::TextToImage ? text_to_image : image_to_text;
    }
};

/// Ranks every judged query in `direction` and keeps the top max(k) ids.
/// Query representations come from `queries`, candidates from `store`.
inline Rankings rank_queries(const store::RepresentationStore& store, const store::RepresentationStore& queries,
                             const Judgments& judgments, Direction direction, std::size_t depth,
                             const sim::Scorer& scorer, const sim::RankOptions& opts = {}) {
    Rankings out;
    out.reserve(judgments.size());
    const auto candidates = store.candidates(target_kind(direction));
    for (const auto& [q, relevant] : judgments) {
        const auto rep = queries.get_representation(q, query_kind(direction));
        Ranking r{q, {}};
        for (auto& hit : sim::rank(RepresentationView::of(rep), candidates, depth, scorer, opts))
            r.ranked_ids.push_back(std::move(hit.item_id));
        out.push_back(std::move(r));
    }
    return out;
}

/// Recall@k tables for both directions. Pass `query_store` to take query
/// representations from a held-out store; by default they come from `store`.
inline BenchmarkResult run_benchmark(const store::RepresentationStore& store, const RelevanceJudgments& judgments,
                                     const BenchmarkConfig& cfg = {},
                                     const store::RepresentationStore* query_store = nullptr) {
    if (cfg.ks.empty()) fail(ErrorCode::InvalidArgument, "at least one k is required");
    auto ks = cfg.ks;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");

    const auto& queries = query_store ? *query_store : store;
    if (!(queries.dims() == store.dims())) fail(ErrorCode::DimMismatch, "query store dims differ from the store's");
    validate_judgments(judgments, store, queries);
    const auto scorer = sim::make_scorer(cfg.scorer);

    BenchmarkResult result;
    result.scorer_id = cfg.scorer.scorer_id;
    result.alpha = cfg.scorer.alpha;
    for (Direction dir : kDirections) {
        RecallTable t;
        t.direction = dir;
        t.query_count = judgments[dir].size();
        t.item_count = store.count(target_kind(dir));
        const auto start = std::chrono::steady_clock::now();
        Rankings rankings;
        if (t.query_count > 0) {
            if (t.item_count == 0) fail(ErrorCode::EmptyCandidateSet, "no candidates for " + std::string(to_string(dir)));
            rankings = rank_queries(store, queries, judgments[dir], dir, ks.back(), *scorer, cfg.rank);
        }
        t.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (std::size_t k : ks) t.rows.push_back({k, recall_at_k(rankings, judgments[dir], k)});
        (dir == Direction::TextToImage ? result.text_to_image : result.image_to_text) = std::move(t);
    }
    return result;
}

// --- latency -----------------------------------------------------------------

struct QuerySet {
    Direction direction = Direction::TextToImage;
    std::vector<std::string> ids;  // items of query_kind(direction)
};

/// {"direction": "text_to_image", "queries": ["d0", ...]}
inline QuerySet query_set_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("queries") || !doc["queries"].is_array())
        fail(ErrorCode::InvalidArgument, "query file needs a \"queries\" list");
    QuerySet qs;
    if (doc.contains("direction")) {
        if (!doc["direction"].is_string()) fail(ErrorCode::InvalidArgument, "direction must be a string");
        qs.direction = parse_direction(doc["direction"].get<std::string>());
    }
    for (const auto& id : doc["queries"]) {
        if (!id.is_string()) fail(ErrorCode::InvalidArgument, "query ids must be strings");
        qs.ids.push_back(id.get<std::string>());
    }
    return qs;
}

inline nlohmann::json to_json(const QuerySet& qs) {
    return {{"direction", to_string(qs.direction)}, {"queries", qs.ids}};
}

inline QuerySet load_query_set(const std::filesystem::path& path) { return query_set_from_json(read_json_file(path)); }

struct LatencyConfig {
    std::size_t k = 10;
    sim::ScorerConfig scorer;
    sim::RankOptions rank;
    std::size_t warmup_passes = 1;  // full passes over the queries, discarded
};

struct LatencySample {
    std::string query_id;
    std::size_t repetition = 0;  // 0-based, warm-up excluded
    double lookup_seconds = 0.0;   // copying the query representation out of the store
    double scoring_seconds = 0.0;  // scoring and ranking every candidate
    double total_seconds() const { return lookup_seconds + scoring_seconds; }
};

struct LatencyStats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;  // nearest-rank
};

inline LatencyStats summarize(std::vector<double> values) {
    LatencyStats s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t n = values.size();
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95 = values[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

struct LatencyReport {
    Direction direction = Direction::TextToImage;
    std::size_t item_count = 0;
    std::size_t repetitions = 0;
    std::size_t k = 0;
    std::string scorer_id;
    double alpha = 0.0;
    std::vector<LatencySample> samples;
    LatencyStats lookup, scoring, total;
    std::string hardware;
};

/// Short description of the machine and build the numbers came from.
inline std::string hardware_note(std::size_t ranking_threads) {
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    for (std::string line; std::getline(info, line);) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = line.substr(line.find_first_not_of(' ', colon + 1));
            break;
        }
    }
    std::string note = cpu + "; " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads; " +
                       std::to_string(ranking_threads) + " ranking threads";
#if defined(__clang__)
    note += "; clang " __clang_version__;
#elif defined(__GNUC__)
    note += "; gcc " __VERSION__;
#endif
#ifdef NDEBUG
    note += "; optimized build";
#else
    note += "; debug build";
#endif
    return note;
}

/// Single-stream per-query latency. The store is already open, so mapping
/// cost is excluded; `warmup_passes` full passes run first and are dropped.
/// The report holds queries x repetitions samples.
inline LatencyReport time_retrieval(const store::RepresentationStore& store, const QuerySet& queries,
                                    std::size_t repetitions, const LatencyConfig& cfg = {}) {
    if (cfg.k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
    LatencyReport report;
    report.direction = queries.direction;
    report.item_count = store.count(target_kind(queries.direction));
    report.repetitions = repetitions;
    report.k = cfg.k;
    report.scorer_id = cfg.scorer.scorer_id;
    report.alpha = cfg.scorer.alpha;
    const std::size_t threads =
        cfg.rank.threads != 0 ? cfg.rank.threads : std::max(1u, std::thread::hardware_concurrency());
    report.hardware = hardware_note(threads);
    if (queries.ids.empty() || repetitions == 0) return report;

    for (const auto& id : queries.ids)
        if (!store.row_of(query_kind(queries.direction), id))
            fail(ErrorCode::UnknownItem, "query '" + id + "' not in store");
    const auto scorer = sim::make_scorer(cfg.scorer);
    const auto candidates = store.candidates(target_kind(queries.direction));
    using clock = std::chrono::steady_clock;

    std::size_t sink = 0;
    for (std::size_t pass = 0; pass < cfg.warmup_passes + repetitions; ++pass) {
        for (const auto& id : queries.ids) {
            const auto t0 = clock::now();
            const auto rep = store.get_representation(id, query_kind(queries.direction));
            const auto t1 = clock::now();
            const auto ranked = sim::rank(RepresentationView::of(rep), candidates, cfg.k, *scorer, cfg.rank);
            const auto t2 = clock::now();
            sink += ranked.size();
            if (pass < cfg.warmup_passes) continue;
            report.samples.push_back({id, pass - cfg.warmup_passes, std::chrono::duration<double>(t1 - t0).count(),
                                      std::chrono::duration<double>(t2 - t1).count()});
        }
    }
    if (sink == 0) fail(ErrorCode::Internal, "ranking produced no results");

    std::vector<double> lookup, scoring, total;
    for (const auto& s : report.samples) {
        lookup.push_back(s.lookup_seconds);
        scoring.push_back(s.scoring_seconds);
        total.push_back(s.total_seconds());
    }
    report.lookup = summarize(lookup);
    report.scoring = summarize(scoring);
    report.total = summarize(total);
    return report;
}

}  // namespace xmodal::eval
