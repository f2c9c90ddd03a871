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
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/providers/encoder.hpp"
#include "xmodal/providers/types.hpp"
#include "xmodal/request/session.hpp"
#include "xmodal/store/gallery.hpp"

namespace xmodal::api {

inline constexpr std::string_view kAlbumMediaPrefix = "/media/album/";

inline bool is_hex_id(std::string_view s) {
    return !s.empty() && s.size() <= 64 &&
           std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

/// One lazily opened AlbumGallery per account under `root/<account_id>`,
/// with uploaded bytes kept next to it in `media/`.
class AlbumRegistry {
public:
    AlbumRegistry(std::filesystem::path root, Dims dims, std::size_t capacity)
        : root_(std::move(root)), dims_(dims), capacity_(capacity) {}

    std::shared_ptr<store::AlbumGallery> get(const std::string& account_id) {
        if (!is_hex_id(account_id)) fail(ErrorCode::Internal, "malformed account id");
        std::lock_guard lock(mu_);
        auto& slot = albums_[account_id];
        if (!slot) slot = std::make_shared<store::AlbumGallery>(root_ / account_id, dims_, account_id, capacity_);
        return slot;
    }

    std::filesystem::path media_dir(const std::string& account_id) const { return root_ / account_id / "media"; }

    /// Validates every payload, checks capacity for the whole batch, then
    /// encodes and ingests in order. Bytes are written before the ingest
    /// commit and removed again if it fails.
    std::vector<std::string> upload(const std::string& account_id, const std::vector<std::string>& images,
                                    providers::Encoder& encoder) {
        if (images.empty()) fail(ErrorCode::InvalidArgument, "no images in upload");
        for (const auto& img : images) providers::validate_payload(providers::Payload::image(img));
        const auto album = get(account_id);
        if (album->info().item_count + images.size() > album->capacity())
            fail(ErrorCode::CapacityExceeded, "upload would exceed the album's " + std::to_string(album->capacity()) +
                                                  " image capacity");
        const auto dir = media_dir(account_id);
        std::filesystem::create_directories(dir);

        std::vector<std::string> ids;
        for (const auto& img : images) {
            const auto rep = encoder.encode_image(img);
            const auto kind = providers::sniff_image(img);
            const std::string file = request::random_hex_id() + (kind == providers::ImageFormat::Png ? ".png" : ".jpg");
            const auto path = dir / file;
            {
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                out.write(img.data(), static_cast<std::streamsize>(img.size()));
                if (!out) fail(ErrorCode::Internal, "cannot store uploaded image");
            }
            try {
                ids.push_back(album->ingest_item(std::string(kAlbumMediaPrefix) + file, rep));
            } catch (...) {
                std::error_code ec;
                std::filesystem::remove(path, ec);
                throw;
            }
        }
        return ids;
    }

    /// Path of an album media file owned by `account_id`, or nullopt.
    std::optional<std::filesystem::path> media_file(const std::string& account_id, std::string_view file) const {
        const auto dot = file.find('.');
        if (dot == std::string_view::npos || !is_hex_id(file.substr(0, dot))) return std::nullopt;
        const auto ext = file.substr(dot);
        if (ext != ".jpg" && ext != ".png") return std::nullopt;
        auto path = media_dir(account_id) / std::string(file);
        if (!std::filesystem::is_regular_file(path)) return std::nullopt;
        return path;
    }

    std::size_t capacity() const { return capacity_; }

private:
    std::filesystem::path root_;
    Dims dims_;
    std::size_t capacity_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<store::AlbumGallery>> albums_;
};

}  // namespace xmodal::api
