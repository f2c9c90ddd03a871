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
#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/similarity/candidates.hpp"
#include "xmodal/similarity/scorer.hpp"

namespace xmodal::sim {

struct RankedResult {
    std::string item_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based

    friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

struct RankOptions {
    std::size_t threads = 0;               // 0: one per hardware thread
    std::size_t min_rows_per_thread = 2048;
};

namespace detail {

struct Scored {
    double score;
    std::size_t row;
};

/// Strict total order: higher score first, then ascending id.
struct Better {
    const CandidateSource* source;
    bool operator()(const Scored& a, const Scored& b) const {
        if (a.score != b.score) return a.score > b.score;
        return source->id(a.row) < source->id(b.row);
    }
};

/// Keeps the best `k` of rows [begin, end) in a heap whose front is the
/// worst kept entry.
inline std::vector<Scored> top_k_range(const PreparedQuery& query, const CandidateSource& source, const Scorer& scorer,
                                       std::size_t begin, std::size_t end, std::size_t k) {
    const Better better{&source};
    std::vector<Scored> heap;
    heap.reserve(std::min(k, end - begin) + 1);
    ItemScratch scratch;
    for (std::size_t row = begin; row < end; ++row) {
        const Scored s{scorer.score(query, source.view(row, scratch)), row};
        if (heap.size() < k) {
            heap.push_back(s);
            std::push_heap(heap.begin(), heap.end(), better);
        } else if (better(s, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), better);
            heap.back() = s;
            std::push_heap(heap.begin(), heap.end(), better);
        }
    }
    return heap;
}

}  // namespace detail

/// Exhaustively scores every candidate and returns the best min(k, n),
/// ordered by score descending with ties broken by ascending item id.
/// Output is identical for any thread count.
inline std::vector<RankedResult> rank(RepresentationView query, const CandidateSource& candidates, std::size_t k,
                                      const Scorer& scorer, const RankOptions& options = {}) {
    if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
    const std::size_t n = candidates.size();
    if (n == 0) fail(ErrorCode::EmptyCandidateSet, "no candidates to rank");

    const PreparedQuery prepared = scorer.prepare(query);

    std::size_t threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::clamp<std::size_t>(n / std::max<std::size_t>(1, options.min_rows_per_thread), 1, threads);

    std::vector<std::vector<detail::Scored>> partial(threads);
    if (threads == 1) {
        partial[0] = detail::top_k_range(prepared, candidates, scorer, 0, n, k);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> workers;
            workers.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t) {
                const std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
                workers.emplace_back([&, t, begin, end] {
                    try {
                        partial[t] = detail::top_k_range(prepared, candidates, scorer, begin, end, k);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
        }
        // lowest chunk first, matching what a sequential scan would raise
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<detail::Scored> merged;
    for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
    const detail::Better better{&candidates};
    const std::size_t keep = std::min(k, merged.size());
    std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep), merged.end(), better);

    std::vector<RankedResult> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
        out.push_back({std::string(candidates.id(merged[i].row)), merged[i].score, i + 1});
    return out;
}

inline std::vector<RankedResult> rank(RepresentationView query, const CandidateSource& candidates, std::size_t k,
                                      const ScorerConfig& cfg, const RankOptions& options = {}) {
    const auto scorer = make_scorer(cfg);
    return rank(query, candidates, k, *scorer, options);
}

/// Scores every candidate in row order.
inline std::vector<double> score_all(RepresentationView query, const CandidateSource& candidates,
                                     const Scorer& scorer) {
    const PreparedQuery prepared = scorer.prepare(query);
    std::vector<double> scores(candidates.size());
    ItemScratch scratch;
    for (std::size_t row = 0; row < candidates.size(); ++row)
        scores[row] = scorer.score(prepared, candidates.view(row, scratch));
    return scores;
}

}  // namespace xmodal::sim
