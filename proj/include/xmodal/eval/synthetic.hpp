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

#include <filesystem>
#include <string>

#include "xmodal/core/random.hpp"
#include "xmodal/eval/benchmark.hpp"
#include "xmodal/store/store_writer.hpp"

namespace xmodal::eval {

struct SyntheticSpec {
    std::size_t images = 100;
    std::size_t descriptions_per_image = 1;
    Dims dims{64, 64, 16};
    float noise = 0.5f;  // per-entry perturbation of a caption away from its image; 0 copies it
    std::uint64_t seed = 1;
    std::string dtype = "<f4";
};

struct SyntheticFixture {
    std::filesystem::path manifest;
    std::filesystem::path judgments_file;
    RelevanceJudgments judgments;
};

inline Representation uniform_representation(SplitMix64& rng, const Dims& dims) {
    Representation r;
    r.local_dim = dims.local;
    r.global.resize(dims.global);
    for (auto& v : r.global) v = rng.uniform();
    r.locals.resize(dims.local_values());
    for (auto& v : r.locals) v = rng.uniform();
    return r;
}

/// Writes a linked store of random images, each annotated by
/// `descriptions_per_image` noisy copies of itself, plus judgments.json
/// derived from the links. Ids are i<n> and d<n>.
inline SyntheticFixture write_synthetic_store(const std::filesystem::path& dir, const SyntheticSpec& spec) {
    if (spec.images == 0) fail(ErrorCode::InvalidArgument, "a synthetic store needs at least one image");
    if (!(spec.noise >= 0.0f)) fail(ErrorCode::InvalidArgument, "noise must be non-negative");
    SplitMix64 rng(spec.seed);
    store::StoreWriter writer(spec.dims, spec.dtype);
    writer.reserve(spec.images, spec.images * spec.descriptions_per_image);
    std::size_t next_description = 0;
    for (std::size_t i = 0; i < spec.images; ++i) {
        const auto image = uniform_representation(rng, spec.dims);
        const std::string image_id = "i" + std::to_string(i);
        writer.add_image({image_id, "images/" + image_id + ".jpg"}, image);
        for (std::size_t c = 0; c < spec.descriptions_per_image; ++c) {
            Representation d = image;
            for (auto& v : d.global) v += spec.noise * rng.uniform();
            for (auto& v : d.locals) v += spec.noise * rng.uniform();
            const std::string id = "d" + std::to_string(next_description++);
            writer.add_description({id, "synthetic caption " + id + " of " + image_id, image_id}, d);
        }
    }
    SyntheticFixture f;
    f.manifest = writer.write(dir);
    f.judgments = judgments_from_links(*store::RepresentationStore::open(f.manifest));
    f.judgments_file = dir / "judgments.json";
    write_json_file(f.judgments_file, to_json(f.judgments));
    return f;
}

}  // namespace xmodal::eval
