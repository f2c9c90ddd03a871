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

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"

namespace xmodal {

enum class ItemKind { Image, Description };

constexpr std::string_view to_string(ItemKind kind) {
    return kind == ItemKind::Image ? "image" : "description";
}

/// Row-major read-only view of a rows x cols block of floats.
struct MatrixView {
    const float* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const float> row(std::size_t i) const { return {data + i * cols, cols}; }
    bool empty() const { return rows == 0 || cols == 0; }
};

/// Dimensions shared by every representation in one store.
struct Dims {
    std::size_t global = 0;          // d_g
    std::size_t local = 0;           // d_l
    std::size_t locals_per_item = 0; // n_l

    std::size_t local_values() const { return local * locals_per_item; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

inline constexpr Dims kDefaultDims{768, 256, 200};

/// One item's position in the shared latent space: a global vector and a
/// row-major matrix of local vectors.
struct Representation {
    std::vector<float> global;
    std::vector<float> locals;  // locals_per_item * local values, row-major
    std::size_t local_dim = 0;

    std::size_t local_count() const { return local_dim == 0 ? 0 : locals.size() / local_dim; }
    MatrixView local_view() const { return {locals.data(), local_count(), local_dim}; }

    bool all_finite() const {
        for (float v : global)
            if (!std::isfinite(v)) return false;
        for (float v : locals)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Dims dims() const { return {global.size(), local_dim, local_count()}; }

    friend bool operator==(const Representation&, const Representation&) = default;
};

/// Borrowed form of a Representation. Store-backed views point straight into
/// mapped file pages.
struct RepresentationView {
    std::span<const float> global;
    MatrixView locals;

    static RepresentationView of(const Representation& r) {
        return {std::span<const float>(r.global), r.local_view()};
    }
};

inline void check_dims(const Representation& r, const Dims& expected) {
    if (r.local_dim == 0 || r.locals.size() % r.local_dim != 0 || !(r.dims() == expected)) {
        fail(ErrorCode::DimMismatch,
             "representation dims (" + std::to_string(r.global.size()) + ", " +
                 std::to_string(r.local_count()) + "x" + std::to_string(r.local_dim) +
                 ") do not match store dims (" + std::to_string(expected.global) + ", " +
                 std::to_string(expected.locals_per_item) + "x" + std::to_string(expected.local) + ")");
    }
}

}  // namespace xmodal
