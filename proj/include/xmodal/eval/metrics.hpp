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

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"

namespace xmodal::eval {

/// Query id to the ids of every item relevant to it.
using Judgments = std::map<std::string, std::set<std::string>>;

struct Ranking {
    std::string query_id;
    std::vector<std::string> ranked_ids;  // best first
};
using Rankings = std::vector<Ranking>;

/// Percentage of queries whose top k holds at least one relevant item.
/// Zero queries give 0.
inline double recall_at_k(const Rankings& rankings, const Judgments& judgments, std::size_t k) {
    if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
    if (rankings.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& r : rankings) {
        const auto it = judgments.find(r.query_id);
        if (it == judgments.end() || it->second.empty())
            fail(ErrorCode::MissingJudgment, "no relevance judgments for query '" + r.query_id + "'");
        const std::size_t depth = std::min(k, r.ranked_ids.size());
        for (std::size_t i = 0; i < depth; ++i) {
            if (it->second.count(r.ranked_ids[i])) {
                ++hits;
                break;
            }
        }
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(rankings.size());
}

// --- description matching ----------------------------------------------------

/// Candidate text, reference text -> similarity in [0, 1].
using TextMetric = std::function<double(std::string_view, std::string_view)>;

/// Lowercased runs of ASCII letters and digits; bytes of multi-byte UTF-8
/// sequences count as word characters.
inline std::vector<std::string> metric_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// Harmonic mean of token precision and recall with multiset overlap. Two
/// texts without tokens match fully.
inline double token_f1(std::string_view candidate, std::string_view reference) {
    const auto c = metric_tokens(candidate), r = metric_tokens(reference);
    if (c.empty() || r.empty()) return c.empty() && r.empty() ? 1.0 : 0.0;
    std::map<std::string_view, std::size_t> counts;
    for (const auto& t : r) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : c) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double p = static_cast<double>(overlap) / static_cast<double>(c.size());
    const double rc = static_cast<double>(overlap) / static_cast<double>(r.size());
    return 2.0 * p * rc / (p + rc);
}

/// Best metric value of the candidate against any reference.
inline double description_match_score(std::string_view candidate, const std::vector<std::string>& references,
                                      const TextMetric& metric = token_f1) {
    if (references.empty()) fail(ErrorCode::EmptyReferences, "description match needs at least one reference");
    double best = 0.0;
    for (const auto& ref : references) {
        const double v = metric(candidate, ref);
        if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidArgument, "metric value outside [0, 1]");
        best = std::max(best, v);
    }
    return best;
}

struct MatchCase {
    std::string candidate;
    std::vector<std::string> references;
};

/// Mean description_match_score over cases; 0 for no cases.
inline double mean_description_match(const std::vector<MatchCase>& cases, const TextMetric& metric = token_f1) {
    if (cases.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : cases) sum += description_match_score(c.candidate, c.references, metric);
    return sum / static_cast<double>(cases.size());
}

}  // namespace xmodal::eval
