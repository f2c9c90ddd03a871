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
#include <filesystem>
#include <string>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/store/manifest.hpp"
#include "xmodal/store/npy.hpp"

namespace xmodal::store {

/// Accumulates items in memory and writes a complete store directory
/// (four NPY files and a manifest).
class StoreWriter {
public:
    explicit StoreWriter(Dims dims, std::string dtype = "<f4") {
        manifest_.dims = dims;
        manifest_.dtype = std::move(dtype);
        if (manifest_.dtype != "<f4" && manifest_.dtype != "<f2")
            fail(ErrorCode::DtypeMismatch, "stores hold '<f4' or '<f2', not '" + manifest_.dtype + "'");
    }

    void reserve(std::size_t images, std::size_t descriptions) {
        manifest_.images.reserve(images);
        image_global_.reserve(images * manifest_.dims.global);
        image_local_.reserve(images * manifest_.dims.local_values());
        manifest_.descriptions.reserve(descriptions);
        description_global_.reserve(descriptions * manifest_.dims.global);
        description_local_.reserve(descriptions * manifest_.dims.local_values());
    }

    void add_image(ImageEntry entry, const Representation& rep) {
        validate(rep);
        manifest_.images.push_back(std::move(entry));
        image_global_.insert(image_global_.end(), rep.global.begin(), rep.global.end());
        image_local_.insert(image_local_.end(), rep.locals.begin(), rep.locals.end());
    }

    void add_description(DescriptionEntry entry, const Representation& rep) {
        validate(rep);
        manifest_.descriptions.push_back(std::move(entry));
        description_global_.insert(description_global_.end(), rep.global.begin(), rep.global.end());
        description_local_.insert(description_local_.end(), rep.locals.begin(), rep.locals.end());
    }

    /// Writes into `dir` (created if needed) and returns the manifest path.
    /// Pool stores may leave descriptions unlinked.
    std::filesystem::path write(const std::filesystem::path& dir, bool require_links = true,
                                const std::string& manifest_name = "manifest.json") {
        std::filesystem::create_directories(dir);
        manifest_.reindex(require_links);
        const Dims& d = manifest_.dims;
        manifest_.files = {dir / "image_global.npy", dir / "image_local.npy", dir / "description_global.npy",
                           dir / "description_local.npy"};

        const std::size_t ni = manifest_.images.size();
        const std::size_t nd = manifest_.descriptions.size();
        const std::vector<std::size_t> ig{ni, d.global}, il{ni, d.locals_per_item, d.local};
        const std::vector<std::size_t> dg{nd, d.global}, dl{nd, d.locals_per_item, d.local};
        write_npy_floats(manifest_.files.image_global, manifest_.dtype, ig, image_global_);
        write_npy_floats(manifest_.files.image_local, manifest_.dtype, il, image_local_);
        write_npy_floats(manifest_.files.description_global, manifest_.dtype, dg, description_global_);
        write_npy_floats(manifest_.files.description_local, manifest_.dtype, dl, description_local_);

        const auto path = dir / manifest_name;
        save_manifest(manifest_, path);
        return path;
    }

    const StoreManifest& manifest() const { return manifest_; }

private:
    void validate(const Representation& rep) const {
        check_dims(rep, manifest_.dims);
        if (!rep.all_finite()) fail(ErrorCode::InvalidArgument, "representation has non-finite entries");
    }

    StoreManifest manifest_;
    std::vector<float> image_global_, image_local_;
    std::vector<float> description_global_, description_local_;
};

}  // namespace xmodal::store
