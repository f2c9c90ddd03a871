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
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"

namespace xmodal::sim {

/// Dot product with eight independent float accumulators combined in a
/// fixed order, so results never depend on call site or thread.
inline float dot(const float* a, const float* b, std::size_t n) {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc[0] += a[i + 0] * b[i + 0];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
        acc[4] += a[i + 4] * b[i + 4];
        acc[5] += a[i + 5] * b[i + 5];
        acc[6] += a[i + 6] * b[i + 6];
        acc[7] += a[i + 7] * b[i + 7];
    }
    for (std::size_t j = 0; j < 8 && i + j < n; ++j) acc[j] += a[i + j] * b[i + j];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

inline float squared_norm(std::span<const float> v) { return dot(v.data(), v.data(), v.size()); }

/// Cosine from precomputed squared norms, clamped to [-1, 1].
/// Equal norms divide by the squared norm itself, so a vector scored against
/// itself gives exactly 1.
inline double cosine_with_norms(std::span<const float> u, std::span<const float> v, float u_sq, float v_sq) {
    const double denom = u_sq == v_sq ? static_cast<double>(u_sq)
                                      : std::sqrt(static_cast<double>(u_sq)) * std::sqrt(static_cast<double>(v_sq));
    const double c = static_cast<double>(dot(u.data(), v.data(), u.size())) / denom;
    return std::clamp(c, -1.0, 1.0);
}

inline double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size())
        fail(ErrorCode::DimMismatch, "cosine of vectors with " + std::to_string(u.size()) + " and " +
                                         std::to_string(v.size()) + " dims");
    const float u_sq = squared_norm(u);
    const float v_sq = squared_norm(v);
    if (u_sq == 0.0f || v_sq == 0.0f) fail(ErrorCode::ZeroVector, "cosine of a zero vector");
    return cosine_with_norms(u, v, u_sq, v_sq);
}

inline std::vector<float> row_squared_norms(const MatrixView& m) {
    std::vector<float> norms(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        norms[r] = squared_norm(m.row(r));
        if (norms[r] == 0.0f) fail(ErrorCode::ZeroVector, "local row " + std::to_string(r) + " is all zero");
    }
    return norms;
}

/// Mean over query rows of the best cosine against any item row, with the
/// query's row norms supplied by the caller.
inline double local_score_with_norms(const MatrixView& query, std::span<const float> query_sq,
                                     const MatrixView& item) {
    if (item.empty()) fail(ErrorCode::EmptyLocalSet, "item has no local representations");
    if (item.cols != query.cols)
        fail(ErrorCode::DimMismatch, "local dims differ: " + std::to_string(query.cols) + " vs " +
                                         std::to_string(item.cols));
    const std::vector<float> item_sq = row_squared_norms(item);
    double sum = 0.0;
    for (std::size_t q = 0; q < query.rows; ++q) {
        const auto qrow = query.row(q);
        double best = -2.0;
        for (std::size_t r = 0; r < item.rows; ++r) best = std::max(best, cosine_with_norms(qrow, item.row(r), query_sq[q], item_sq[r]));
        sum += best;
    }
    return sum / static_cast<double>(query.rows);
}

inline double local_score(const MatrixView& query, const MatrixView& item) {
    if (query.empty()) fail(ErrorCode::EmptyLocalSet, "query has no local representations");
    const auto query_sq = row_squared_norms(query);
    return local_score_with_norms(query, query_sq, item);
}

inline constexpr std::string_view kReferenceScorerId = "fused-reference";

struct ScorerConfig {
    double alpha = 0.5;  // weight of the global cosine; 1 - alpha goes to the local score
    std::string scorer_id{kReferenceScorerId};

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            fail(ErrorCode::InvalidArgument, "alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
};

/// A query with its norms computed once for a whole ranking pass. Borrows
/// the query data.
struct PreparedQuery {
    RepresentationView rep;
    float global_sq = 0.0f;
    std::vector<float> local_sq;
};

/// Pluggable relevance head. Implementations must be pure: the same
/// (query, item) always yields the same bits.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::string_view id() const = 0;
    virtual PreparedQuery prepare(RepresentationView query) const = 0;
    virtual double score(const PreparedQuery& query, RepresentationView item) const = 0;
};

/// Reference head: alpha * cos(global) + (1 - alpha) * local_score.
class FusedScorer final : public Scorer {
public:
    explicit FusedScorer(double alpha = 0.5) : alpha_(alpha) { ScorerConfig{alpha}.validate(); }

    std::string_view id() const override { return kReferenceScorerId; }
    double alpha() const { return alpha_; }

    PreparedQuery prepare(RepresentationView query) const override {
        PreparedQuery p{query, 0.0f, {}};
        if (alpha_ > 0.0) {
            p.global_sq = squared_norm(query.global);
            if (p.global_sq == 0.0f) fail(ErrorCode::ZeroVector, "query global vector is zero");
        }
        if (alpha_ < 1.0) {
            if (query.locals.empty()) fail(ErrorCode::EmptyLocalSet, "query has no local representations");
            p.local_sq = row_squared_norms(query.locals);
        }
        return p;
    }

    double score(const PreparedQuery& q, RepresentationView item) const override {
        double global_part = 0.0, local_part = 0.0;
        if (alpha_ > 0.0) {
            if (item.global.size() != q.rep.global.size())
                fail(ErrorCode::DimMismatch, "global dims differ: " + std::to_string(q.rep.global.size()) + " vs " +
                                                 std::to_string(item.global.size()));
            const float item_sq = squared_norm(item.global);
            if (item_sq == 0.0f) fail(ErrorCode::ZeroVector, "item global vector is zero");
            global_part = alpha_ * cosine_with_norms(q.rep.global, item.global, q.global_sq, item_sq);
        }
        if (alpha_ < 1.0) local_part = (1.0 - alpha_) * local_score_with_norms(q.rep.locals, q.local_sq, item.locals);
        return std::clamp(global_part + local_part, -1.0, 1.0);
    }

private:
    double alpha_;
};

inline std::unique_ptr<Scorer> make_scorer(const ScorerConfig& cfg) {
    cfg.validate();
    if (cfg.scorer_id == kReferenceScorerId) return std::make_unique<FusedScorer>(cfg.alpha);
    fail(ErrorCode::InvalidArgument, "unknown scorer '" + cfg.scorer_id + "'");
}

inline double fused_score(const Representation& query, const Representation& item, const ScorerConfig& cfg) {
    const auto scorer = make_scorer(cfg);
    const auto prepared = scorer->prepare(RepresentationView::of(query));
    return scorer->score(prepared, RepresentationView::of(item));
}

}  // namespace xmodal::sim
