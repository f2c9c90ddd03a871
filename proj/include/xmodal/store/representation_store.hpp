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
#include <cstring>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/similarity/candidates.hpp"
#include "xmodal/store/half.hpp"
#include "xmodal/store/manifest.hpp"
#include "xmodal/store/mapped_file.hpp"
#include "xmodal/store/npy.hpp"

namespace xmodal::store {

/// One mapped NPY file whose leading axis is the item row.
class TensorBlock {
public:
    TensorBlock() = default;

    /// Maps `path` and checks it holds `rows` items of `row_shape` in `dtype`.
    TensorBlock(const std::filesystem::path& path, std::string_view dtype, std::size_t rows,
                std::vector<std::size_t> row_shape)
        : file_(path) {
        header_ = parse_npy_header(file_.bytes());
        if (header_.dtype != dtype) {
            fail(ErrorCode::DtypeMismatch,
                 path.string() + " holds '" + header_.dtype + "', manifest declares '" + std::string(dtype) + "'");
        }
        if (header_.fortran_order) fail(ErrorCode::ShapeMismatch, path.string() + " is Fortran ordered");

        std::vector<std::size_t> expected{rows};
        expected.insert(expected.end(), row_shape.begin(), row_shape.end());
        if (header_.shape != expected) {
            fail(ErrorCode::ShapeMismatch, path.string() + " has shape " + shape_string(header_.shape) +
                                               ", manifest implies " + shape_string(expected));
        }
        if (file_.size() - header_.data_offset != header_.payload_bytes()) {
            fail(ErrorCode::ShapeMismatch, path.string() + " payload is " +
                                               std::to_string(file_.size() - header_.data_offset) +
                                               " bytes, header declares " + std::to_string(header_.payload_bytes()));
        }
        rows_ = rows;
        row_values_ = 1;
        for (auto d : row_shape) row_values_ *= d;
        element_size_ = header_.element_size();
        payload_ = file_.bytes().data() + header_.data_offset;
    }

    std::size_t rows() const { return rows_; }
    std::size_t row_values() const { return row_values_; }
    const TensorFileHeader& header() const { return header_; }

    /// Float32 rows are returned in place; float16 rows are widened into `scratch`.
    std::span<const float> row(std::size_t r, std::vector<float>& scratch) const {
        const std::byte* p = payload_ + r * row_values_ * element_size_;
        if (element_size_ == 4) return {reinterpret_cast<const float*>(p), row_values_};
        scratch.resize(row_values_);
        for (std::size_t i = 0; i < row_values_; ++i) {
            std::uint16_t h;
            std::memcpy(&h, p + 2 * i, 2);
            scratch[i] = half_to_float(h);
        }
        return scratch;
    }

private:
    static std::string shape_string(const std::vector<std::size_t>& shape) {
        std::string s = "(";
        for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? ", " : "") + std::to_string(shape[i]);
        return s + ")";
    }

    MappedFile file_;
    TensorFileHeader header_;
    const std::byte* payload_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t row_values_ = 0;
    std::size_t element_size_ = 4;
};

class RepresentationStore;
using StoreHandle = std::shared_ptr<const RepresentationStore>;

/// Immutable, memory-mapped view of the four representation files plus
/// their manifest. Safe to share between threads.
class RepresentationStore {
public:
    /// Candidate view over one item kind; borrows the store.
    class Candidates final : public sim::CandidateSource {
    public:
        Candidates(const RepresentationStore& store, ItemKind kind) : store_(&store), kind_(kind) {}

        std::size_t size() const override { return store_->count(kind_); }
        std::string_view id(std::size_t row) const override { return store_->id_at(kind_, row); }
        RepresentationView view(std::size_t row, sim::ItemScratch& scratch) const override {
            return store_->view(kind_, row, scratch);
        }

    private:
        const RepresentationStore* store_;
        ItemKind kind_;
    };

    /// Opens a full store: all four files, every description linked.
    static StoreHandle open(const std::filesystem::path& manifest_path) {
        return std::shared_ptr<const RepresentationStore>(
            new RepresentationStore(load_manifest(manifest_path, /*require_links=*/true), /*descriptions_only=*/false));
    }

    /// Opens a description pool: only the description files are required and
    /// captions need not annotate an image.
    static StoreHandle open_pool(const std::filesystem::path& manifest_path) {
        return std::shared_ptr<const RepresentationStore>(
            new RepresentationStore(load_manifest(manifest_path, /*require_links=*/false), /*descriptions_only=*/true));
    }

    const StoreManifest& manifest() const { return manifest_; }
    const Dims& dims() const { return manifest_.dims; }
    std::size_t image_count() const { return manifest_.images.size(); }
    std::size_t description_count() const { return manifest_.descriptions.size(); }
    std::size_t count(ItemKind kind) const { return kind == ItemKind::Image ? image_count() : description_count(); }

    std::string_view id_at(ItemKind kind, std::size_t row) const {
        return kind == ItemKind::Image ? std::string_view(manifest_.images[row].id)
                                       : std::string_view(manifest_.descriptions[row].id);
    }

    std::optional<std::size_t> row_of(ItemKind kind, std::string_view id) const {
        const auto& index = kind == ItemKind::Image ? manifest_.image_index : manifest_.description_index;
        const auto it = index.find(std::string(id));
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    RepresentationView view(ItemKind kind, std::size_t row, sim::ItemScratch& scratch) const {
        const auto& [global, local] = blocks(kind);
        return {global.row(row, scratch.global),
                MatrixView{local.row(row, scratch.locals).data(), manifest_.dims.locals_per_item, manifest_.dims.local}};
    }

    /// Owned copy of an item's representation.
    Representation get_representation(std::string_view id, ItemKind kind) const {
        const auto row = row_of(kind, id);
        if (!row) fail(ErrorCode::UnknownItem, std::string(to_string(kind)) + " '" + std::string(id) + "' not in store");
        sim::ItemScratch scratch;
        const auto v = view(kind, *row, scratch);
        Representation r;
        r.global.assign(v.global.begin(), v.global.end());
        r.locals.assign(v.locals.data, v.locals.data + v.locals.rows * v.locals.cols);
        r.local_dim = manifest_.dims.local;
        return r;
    }

    /// Image annotated by a description.
    const std::string& resolve_links(std::string_view description_id) const {
        const auto it = manifest_.link_table.find(std::string(description_id));
        if (it == manifest_.link_table.end())
            fail(ErrorCode::UnknownItem, "description '" + std::string(description_id) + "' has no linked image");
        return it->second;
    }

    const DescriptionEntry& description(std::string_view id) const {
        const auto row = row_of(ItemKind::Description, id);
        if (!row) fail(ErrorCode::UnknownItem, "description '" + std::string(id) + "' not in store");
        return manifest_.descriptions[*row];
    }

    const ImageEntry& image(std::string_view id) const {
        const auto row = row_of(ItemKind::Image, id);
        if (!row) fail(ErrorCode::UnknownItem, "image '" + std::string(id) + "' not in store");
        return manifest_.images[*row];
    }

    Candidates candidates(ItemKind kind) const { return Candidates(*this, kind); }

private:
    RepresentationStore(StoreManifest manifest, bool descriptions_only) : manifest_(std::move(manifest)) {
        const Dims& d = manifest_.dims;
        auto require = [](const std::filesystem::path& p, const char* role) {
            if (p.empty()) fail(ErrorCode::CorruptManifest, std::string("manifest lacks the ") + role + " file");
        };
        if (!descriptions_only) {
            require(manifest_.files.image_global, "image_global");
            require(manifest_.files.image_local, "image_local");
            image_global_ = TensorBlock(manifest_.files.image_global, manifest_.dtype, image_count(), {d.global});
            image_local_ = TensorBlock(manifest_.files.image_local, manifest_.dtype, image_count(),
                                       {d.locals_per_item, d.local});
        }
        require(manifest_.files.description_global, "description_global");
        require(manifest_.files.description_local, "description_local");
        description_global_ =
            TensorBlock(manifest_.files.description_global, manifest_.dtype, description_count(), {d.global});
        description_local_ = TensorBlock(manifest_.files.description_local, manifest_.dtype, description_count(),
                                         {d.locals_per_item, d.local});
    }

    std::pair<const TensorBlock&, const TensorBlock&> blocks(ItemKind kind) const {
        if (kind == ItemKind::Image) return {image_global_, image_local_};
        return {description_global_, description_local_};
    }

    StoreManifest manifest_;
    TensorBlock image_global_;
    TensorBlock image_local_;
    TensorBlock description_global_;
    TensorBlock description_local_;
};

}  // namespace xmodal::store
