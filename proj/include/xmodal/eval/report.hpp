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

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "xmodal/eval/benchmark.hpp"

namespace xmodal::eval {

namespace detail {

template <class... Args>
std::string printf_string(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string out(static_cast<std::size_t>(n), '\0');
    std::snprintf(out.data(), out.size() + 1, fmt, args...);
    return out;
}

}  // namespace detail

/// Aligned columns, one line per direction.
inline std::string to_text(const BenchmarkResult& r) {
    std::string out = detail::printf_string("scorer %s  alpha %.3f\n", r.scorer_id.c_str(), r.alpha);
    out += detail::printf_string("%-15s %8s %8s", "direction", "queries", "items");
    for (const auto& row : r.text_to_image.rows) out += detail::printf_string(" %8s", ("R@" + std::to_string(row.k)).c_str());
    out += detail::printf_string(" %10s\n", "seconds");
    for (Direction dir : kDirections) {
        const auto& t = r[dir];
        out += detail::printf_string("%-15s %8zu %8zu", std::string(to_string(dir)).c_str(), t.query_count, t.item_count);
        for (const auto& row : t.rows) out += detail::printf_string(" %8.2f", row.recall);
        out += detail::printf_string(" %10.3f\n", t.wall_seconds);
    }
    return out;
}

inline nlohmann::json to_json(const RecallTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) rows.push_back({{"k", row.k}, {"recall", row.recall}});
    return {{"direction", to_string(t.direction)},
            {"queries", t.query_count},
            {"items", t.item_count},
            {"wall_seconds", t.wall_seconds},
            {"rows", rows}};
}

inline nlohmann::json to_json(const BenchmarkResult& r) {
    return {{"scorer", r.scorer_id},
            {"alpha", r.alpha},
            {"tables", nlohmann::json::array({to_json(r.text_to_image), to_json(r.image_to_text)})}};
}

inline nlohmann::json to_json(const LatencyStats& s) {
    return {{"count", s.count}, {"mean_s", s.mean}, {"median_s", s.median}, {"p95_s", s.p95}};
}

inline nlohmann::json to_json(const LatencyReport& r, bool with_samples = true) {
    nlohmann::json j = {{"direction", to_string(r.direction)},
                        {"items", r.item_count},
                        {"repetitions", r.repetitions},
                        {"k", r.k},
                        {"scorer", r.scorer_id},
                        {"alpha", r.alpha},
                        {"lookup", to_json(r.lookup)},
                        {"scoring", to_json(r.scoring)},
                        {"total", to_json(r.total)},
                        {"hardware", r.hardware}};
    if (with_samples) {
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& s : r.samples)
            samples.push_back({{"query", s.query_id},
                               {"repetition", s.repetition},
                               {"lookup_s", s.lookup_seconds},
                               {"scoring_s", s.scoring_seconds}});
        j["samples"] = std::move(samples);
    }
    return j;
}

inline std::string to_text(const LatencyReport& r) {
    std::string out = detail::printf_string(
        "%s over %zu items, k %zu, scorer %s alpha %.3f, %zu samples (%zu repetitions)\n",
        std::string(to_string(r.direction)).c_str(), r.item_count, r.k, r.scorer_id.c_str(), r.alpha,
        r.samples.size(), r.repetitions);
    out += detail::printf_string("%-8s %12s %12s %12s\n", "stage", "mean_s", "median_s", "p95_s");
    const std::pair<const char*, const LatencyStats*> stages[] = {
        {"lookup", &r.lookup}, {"scoring", &r.scoring}, {"total", &r.total}};
    for (const auto& [name, s] : stages)
        out += detail::printf_string("%-8s %12.6f %12.6f %12.6f\n", name, s->mean, s->median, s->p95);
    out += "hardware: " + r.hardware + "\n";
    return out;
}

}  // namespace xmodal::eval
