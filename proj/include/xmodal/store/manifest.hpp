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
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmodal/core/error.hpp"
#include "xmodal/core/representation.hpp"

namespace xmodal::store {

inline constexpr std::string_view kManifestFormat = "xmodal-store";
inline constexpr int kManifestVersion = 1;

struct ImageEntry {
    std::string id;
    std::string uri;
};

struct DescriptionEntry {
    std::string id;
    std::string text;
    std::optional<std::string> image;  // annotated image, absent for pool-only captions
};

struct TensorPaths {
    std::filesystem::path image_global;
    std::filesystem::path image_local;
    std::filesystem::path description_global;
    std::filesystem::path description_local;
};

/// Sidecar metadata for the four tensor files: dims, element type, item
/// order (row i of each file belongs to entry i) and description links.
struct StoreManifest {
    Dims dims = kDefaultDims;
    std::string dtype = "<f4";
    TensorPaths files;  // resolved against the manifest's directory on load
    std::vector<ImageEntry> images;
    std::vector<DescriptionEntry> descriptions;

    std::unordered_map<std::string, std::size_t> image_index;
    std::unordered_map<std::string, std::size_t> description_index;
    std::unordered_map<std::string, std::string> link_table;  // description id -> image id

    /// Rebuilds the lookup maps from the entry lists and validates them.
    /// `require_links` demands that every description annotates an image.
    void reindex(bool require_links) {
        image_index.clear();
        description_index.clear();
        link_table.clear();
        for (std::size_t row = 0; row < images.size(); ++row) {
            if (images[row].id.empty()) fail(ErrorCode::CorruptManifest, "empty image id at row " + std::to_string(row));
            if (!image_index.emplace(images[row].id, row).second)
                fail(ErrorCode::CorruptManifest, "duplicate image id '" + images[row].id + "'");
        }
        for (std::size_t row = 0; row < descriptions.size(); ++row) {
            const auto& d = descriptions[row];
            if (d.id.empty()) fail(ErrorCode::CorruptManifest, "empty description id at row " + std::to_string(row));
            if (!description_index.emplace(d.id, row).second)
                fail(ErrorCode::CorruptManifest, "duplicate description id '" + d.id + "'");
            if (d.image) {
                if (!image_index.contains(*d.image))
                    fail(ErrorCode::CorruptManifest, "description '" + d.id + "' links to unknown image '" + *d.image + "'");
                link_table.emplace(d.id, *d.image);
            } else if (require_links) {
                fail(ErrorCode::CorruptManifest, "description '" + d.id + "' has no linked image");
            }
        }
    }
};

inline StoreManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                    bool require_links = true) {
    StoreManifest m;
    try {
        if (doc.at("format").get<std::string>() != kManifestFormat)
            fail(ErrorCode::CorruptManifest, "unexpected manifest format");
        if (doc.at("version").get<int>() != kManifestVersion)
            fail(ErrorCode::CorruptManifest, "unsupported manifest version");

        const auto& dims = doc.at("dims");
        m.dims.global = dims.at("global").get<std::size_t>();
        m.dims.local = dims.at("local").get<std::size_t>();
        m.dims.locals_per_item = dims.at("locals_per_item").get<std::size_t>();
        if (m.dims.global == 0 || m.dims.local == 0 || m.dims.locals_per_item == 0)
            fail(ErrorCode::CorruptManifest, "dims must be positive");
        m.dtype = doc.value("dtype", std::string("<f4"));
        if (m.dtype != "<f4" && m.dtype != "<f2")
            fail(ErrorCode::CorruptManifest, "dtype must be '<f4' or '<f2', got '" + m.dtype + "'");

        const auto& files = doc.at("files");
        auto resolve = [&](const char* key) -> std::filesystem::path {
            if (!files.contains(key)) return {};
            std::filesystem::path p = files.at(key).get<std::string>();
            return p.is_absolute() ? p : base_dir / p;
        };
        m.files.image_global = resolve("image_global");
        m.files.image_local = resolve("image_local");
        m.files.description_global = resolve("description_global");
        m.files.description_local = resolve("description_local");

        for (const auto& img : doc.value("images", nlohmann::json::array()))
            m.images.push_back({img.at("id").get<std::string>(), img.value("uri", std::string{})});
        for (const auto& d : doc.value("descriptions", nlohmann::json::array())) {
            DescriptionEntry e{d.at("id").get<std::string>(), d.value("text", std::string{}), std::nullopt};
            if (d.contains("image") && !d.at("image").is_null()) e.image = d.at("image").get<std::string>();
            m.descriptions.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptManifest, e.what());
    }
    m.reindex(require_links);
    return m;
}

inline StoreManifest load_manifest(const std::filesystem::path& path, bool require_links = true) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "manifest not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptManifest, path.string() + ": " + e.what());
    }
    return parse_manifest(doc, path.parent_path(), require_links);
}

/// Serializes with file paths relative to `base_dir` where possible.
inline nlohmann::json to_json(const StoreManifest& m, const std::filesystem::path& base_dir) {
    auto rel = [&](const std::filesystem::path& p) {
        return p.empty() ? std::string{} : std::filesystem::relative(p, base_dir).generic_string();
    };
    nlohmann::json files = nlohmann::json::object();
    if (!m.files.image_global.empty()) files["image_global"] = rel(m.files.image_global);
    if (!m.files.image_local.empty()) files["image_local"] = rel(m.files.image_local);
    if (!m.files.description_global.empty()) files["description_global"] = rel(m.files.description_global);
    if (!m.files.description_local.empty()) files["description_local"] = rel(m.files.description_local);

    nlohmann::json images = nlohmann::json::array();
    for (const auto& img : m.images) images.push_back({{"id", img.id}, {"uri", img.uri}});
    nlohmann::json descriptions = nlohmann::json::array();
    for (const auto& d : m.descriptions) {
        nlohmann::json e{{"id", d.id}, {"text", d.text}};
        if (d.image) e["image"] = *d.image;
        descriptions.push_back(std::move(e));
    }
    return {
        {"format", kManifestFormat},
        {"version", kManifestVersion},
        {"dtype", m.dtype},
        {"dims", {{"global", m.dims.global}, {"local", m.dims.local}, {"locals_per_item", m.dims.locals_per_item}}},
        {"files", files},
        {"images", images},
        {"descriptions", descriptions},
    };
}

/// Write-then-rename so readers see either the old or the new manifest.
inline void save_manifest(const StoreManifest& m, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) fail(ErrorCode::Internal, "cannot write " + tmp.string());
        out << to_json(m, path.parent_path()).dump(1) << '\n';
        out.flush();
        if (!out) fail(ErrorCode::Internal, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace xmodal::store
