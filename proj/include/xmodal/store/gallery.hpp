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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"
#include "xmodal/similarity/candidates.hpp"
#include "xmodal/store/half.hpp"
#include "xmodal/store/manifest.hpp"
#include "xmodal/store/npy.hpp"

namespace xmodal::store {

/// Which collection a request is scoped to: a user's private album, the
/// shared precomputed corpus, or live web-search results.
enum class GalleryMode { Album, Common, Web };

constexpr std::string_view to_string(GalleryMode mode) {
    switch (mode) {
        case GalleryMode::Album: return "album";
        case GalleryMode::Common: return "common";
        case GalleryMode::Web: return "web";
    }
    return "common";
}

inline std::optional<GalleryMode> parse_gallery_mode(std::string_view s) {
    if (s == "album") return GalleryMode::Album;
    if (s == "common") return GalleryMode::Common;
    if (s == "web") return GalleryMode::Web;
    return std::nullopt;
}

inline constexpr std::size_t kDefaultAlbumCapacity = 500;

struct GalleryInfo {
    GalleryMode mode = GalleryMode::Common;
    std::optional<std::string> owner;
    std::size_t item_count = 0;
    std::optional<std::size_t> capacity;
};

class Gallery {
public:
    virtual ~Gallery() = default;
    virtual GalleryInfo info() const = 0;
    /// Persists one item and returns its fresh id.
    virtual std::string ingest_item(const std::string& payload_uri, const Representation& rep,
                                    std::span<const std::string> links = {}) = 0;
};

/// Shared corpus and web galleries: never written through this interface.
class ReadOnlyGallery final : public Gallery {
public:
    ReadOnlyGallery(GalleryMode mode, std::size_t item_count) : info_{mode, std::nullopt, item_count, std::nullopt} {}

    GalleryInfo info() const override { return info_; }
    std::string ingest_item(const std::string&, const Representation&, std::span<const std::string>) override {
        fail(ErrorCode::ReadOnlyGallery, std::string(to_string(info_.mode)) + " gallery is read-only");
    }

private:
    GalleryInfo info_;
};

struct AlbumItem {
    std::string id;
    std::string uri;
    Representation rep;
};

/// Immutable point-in-time view of an album, usable as ranking candidates.
class AlbumSnapshot final : public sim::CandidateSource {
public:
    explicit AlbumSnapshot(std::vector<std::shared_ptr<const AlbumItem>> items) : items_(std::move(items)) {}

    std::size_t size() const override { return items_.size(); }
    std::string_view id(std::size_t row) const override { return items_[row]->id; }
    RepresentationView view(std::size_t row, sim::ItemScratch&) const override {
        return RepresentationView::of(items_[row]->rep);
    }
    const AlbumItem& item(std::size_t row) const { return *items_[row]; }

private:
    std::vector<std::shared_ptr<const AlbumItem>> items_;
};

/// A user's private, capacity-bounded image gallery persisted as an
/// appendable store directory. Ingests are serialized; readers take
/// snapshots and never observe a half-written item.
class AlbumGallery final : public Gallery {
public:
    static constexpr const char* kManifestName = "manifest.json";

    AlbumGallery(std::filesystem::path dir, Dims dims, std::string owner,
                 std::size_t capacity = kDefaultAlbumCapacity, std::string dtype = "<f4")
        : dir_(std::move(dir)), owner_(std::move(owner)), capacity_(capacity) {
        std::filesystem::create_directories(dir_);
        const auto manifest_path = dir_ / kManifestName;
        if (std::filesystem::exists(manifest_path)) {
            manifest_ = load_manifest(manifest_path, /*require_links=*/false);
            if (!(manifest_.dims == dims)) fail(ErrorCode::DimMismatch, "album at " + dir_.string() + " has other dims");
            load_items();
        } else {
            manifest_.dims = dims;
            manifest_.dtype = std::move(dtype);
            manifest_.files = {dir_ / "image_global.npy", dir_ / "image_local.npy", dir_ / "description_global.npy",
                               dir_ / "description_local.npy"};
            const std::vector<std::size_t> g{0, dims.global}, l{0, dims.locals_per_item, dims.local};
            write_npy_floats(manifest_.files.image_global, manifest_.dtype, g, {});
            write_npy_floats(manifest_.files.image_local, manifest_.dtype, l, {});
            write_npy_floats(manifest_.files.description_global, manifest_.dtype, g, {});
            write_npy_floats(manifest_.files.description_local, manifest_.dtype, l, {});
            save_manifest(manifest_, manifest_path);
        }
    }

    GalleryInfo info() const override {
        std::lock_guard lock(mutex_);
        return {GalleryMode::Album, owner_, items_.size(), capacity_};
    }

    std::string ingest_item(const std::string& payload_uri, const Representation& rep,
                            std::span<const std::string> links = {}) override {
        if (!links.empty()) fail(ErrorCode::InvalidArgument, "album images carry no description links");
        check_dims(rep, manifest_.dims);
        if (!rep.all_finite()) fail(ErrorCode::InvalidArgument, "representation has non-finite entries");

        std::lock_guard lock(mutex_);
        if (items_.size() >= capacity_) {
            fail(ErrorCode::CapacityExceeded, "album holds its maximum of " + std::to_string(capacity_) + " images");
        }
        auto item = std::make_shared<AlbumItem>(AlbumItem{make_id(items_.size() + 1), payload_uri, rep});

        const auto global_size = std::filesystem::file_size(manifest_.files.image_global);
        const auto local_size = std::filesystem::file_size(manifest_.files.image_local);
        const std::size_t n = items_.size() + 1;
        try {
            append_floats(manifest_.files.image_global, rep.global);
            append_floats(manifest_.files.image_local, rep.locals);
            const std::vector<std::size_t> g{n, manifest_.dims.global};
            const std::vector<std::size_t> l{n, manifest_.dims.locals_per_item, manifest_.dims.local};
            rewrite_npy_shape(manifest_.files.image_global, g);
            rewrite_npy_shape(manifest_.files.image_local, l);

            StoreManifest next = manifest_;
            next.images.push_back({item->id, payload_uri});
            save_manifest(next, dir_ / kManifestName);  // commit point
            manifest_ = std::move(next);
        } catch (...) {
            // roll the tensor files back to the last committed state
            std::error_code ec;
            std::filesystem::resize_file(manifest_.files.image_global, global_size, ec);
            std::filesystem::resize_file(manifest_.files.image_local, local_size, ec);
            const std::vector<std::size_t> g{n - 1, manifest_.dims.global};
            const std::vector<std::size_t> l{n - 1, manifest_.dims.locals_per_item, manifest_.dims.local};
            try {
                rewrite_npy_shape(manifest_.files.image_global, g);
                rewrite_npy_shape(manifest_.files.image_local, l);
            } catch (...) {
            }
            throw;
        }
        items_.push_back(item);
        return item->id;
    }

    std::shared_ptr<const AlbumSnapshot> snapshot() const {
        std::lock_guard lock(mutex_);
        return std::make_shared<const AlbumSnapshot>(items_);
    }

    std::size_t capacity() const { return capacity_; }
    const std::filesystem::path& directory() const { return dir_; }

private:
    static std::string make_id(std::size_t seq) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "img-%06zu", seq);
        return buf;
    }

    void append_floats(const std::filesystem::path& path, std::span<const float> values) const {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        if (manifest_.dtype == "<f2") {
            std::vector<std::uint16_t> halves(values.size());
            for (std::size_t i = 0; i < values.size(); ++i) halves[i] = float_to_half(values[i]);
            out.write(reinterpret_cast<const char*>(halves.data()), static_cast<std::streamsize>(halves.size() * 2));
        } else {
            out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
        }
        out.flush();
        if (!out) fail(ErrorCode::Internal, "append to " + path.string() + " failed");
    }

    // Files may hold rows past the manifest after a crash between append and
    // commit; those rows were never acknowledged and are dropped.
    void load_items() {
        const std::size_t n = manifest_.images.size();
        auto trim = [&](const std::filesystem::path& path, std::vector<std::size_t> row_shape) {
            auto array = read_npy_floats_prefix(path, n);
            std::vector<std::size_t> shape{n};
            shape.insert(shape.end(), row_shape.begin(), row_shape.end());
            const auto committed_size = array.header.data_offset + array.values.size() * array.header.element_size();
            if (array.header.shape[0] != n || std::filesystem::file_size(path) != committed_size) {
                std::filesystem::resize_file(path, committed_size);
                rewrite_npy_shape(path, shape);
            }
            return std::move(array.values);
        };
        const auto globals = trim(manifest_.files.image_global, {manifest_.dims.global});
        const auto locals = trim(manifest_.files.image_local, {manifest_.dims.locals_per_item, manifest_.dims.local});
        const std::size_t dg = manifest_.dims.global, dl = manifest_.dims.local_values();
        for (std::size_t i = 0; i < n; ++i) {
            Representation rep;
            rep.global.assign(globals.begin() + static_cast<std::ptrdiff_t>(i * dg),
                              globals.begin() + static_cast<std::ptrdiff_t>((i + 1) * dg));
            rep.locals.assign(locals.begin() + static_cast<std::ptrdiff_t>(i * dl),
                              locals.begin() + static_cast<std::ptrdiff_t>((i + 1) * dl));
            rep.local_dim = manifest_.dims.local;
            items_.push_back(std::make_shared<const AlbumItem>(
                AlbumItem{manifest_.images[i].id, manifest_.images[i].uri, std::move(rep)}));
        }
    }

    /// Reads the first `rows` rows of a float tensor file.
    static FloatArray read_npy_floats_prefix(const std::filesystem::path& path, std::size_t rows) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
        std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const auto bytes = std::as_bytes(std::span<const char>(raw));
        FloatArray array;
        array.header = parse_npy_header(bytes);
        if (array.header.shape.empty() || array.header.shape[0] < rows)
            fail(ErrorCode::ShapeMismatch, path.string() + " holds fewer rows than the album manifest");
        TensorFileHeader prefix = array.header;
        prefix.shape[0] = rows;
        if (bytes.size() < prefix.data_offset + prefix.payload_bytes())
            fail(ErrorCode::ShapeMismatch, path.string() + " is truncated");
        array.values.resize(prefix.element_count());
        decode_floats(prefix, bytes.subspan(prefix.data_offset), array.values.data());
        return array;
    }

    std::filesystem::path dir_;
    std::string owner_;
    std::size_t capacity_;
    StoreManifest manifest_;
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<const AlbumItem>> items_;
};

}  // namespace xmodal::store
