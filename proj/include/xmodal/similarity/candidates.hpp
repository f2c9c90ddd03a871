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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xmodal/core/representation.hpp"

namespace xmodal::sim {

/// Per-thread buffers for sources that must decode rows (e.g. float16 files).
struct ItemScratch {
    std::vector<float> global;
    std::vector<float> locals;
};

/// A finite, indexable set of items to rank. Implementations are immutable
/// while a ranking runs and may be read from several threads at once, each
/// with its own scratch.
class CandidateSource {
public:
    virtual ~CandidateSource() = default;
    virtual std::size_t size() const = 0;
    virtual std::string_view id(std::size_t row) const = 0;
    /// The returned view stays valid until `scratch` is reused.
    virtual RepresentationView view(std::size_t row, ItemScratch& scratch) const = 0;
};

/// Owning candidate set, used for web results, albums and tests.
class RepresentationSet final : public CandidateSource {
public:
    RepresentationSet() = default;

    void add(std::string id, Representation rep) {
        ids_.push_back(std::move(id));
        reps_.push_back(std::move(rep));
    }

    void reserve(std::size_t n) {
        ids_.reserve(n);
        reps_.reserve(n);
    }

    std::size_t size() const override { return ids_.size(); }
    std::string_view id(std::size_t row) const override { return ids_[row]; }
    RepresentationView view(std::size_t row, ItemScratch&) const override {
        return RepresentationView::of(reps_[row]);
    }

    const Representation& at(std::size_t row) const { return reps_[row]; }

private:
    std::vector<std::string> ids_;
    std::vector<Representation> reps_;
};

}  // namespace xmodal::sim
