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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "support/test_support.hpp"
#include "xmodal/store/representation_store.hpp"
#include "xmodal/store/store_writer.hpp"

namespace xmodal::testing {

/// A seeded store on disk plus the exact representations written to it.
/// Description j annotates image j % n_images.
struct Universe {
    std::unique_ptr<TempDir> dir = std::make_unique<TempDir>();
    Dims dims;
    std::filesystem::path manifest;
    store::StoreHandle store;
    std::vector<std::pair<std::string, Representation>> images;
    std::vector<std::pair<std::string, Representation>> descriptions;
};

inline Universe make_universe(std::uint64_t seed, std::size_t n_images, std::size_t n_descriptions,
                              Dims dims = {16, 8, 4}) {
    Universe u;
    u.dims = dims;
    SplitMix64 rng(seed);
    store::StoreWriter writer(dims);
    writer.reserve(n_images, n_descriptions);
    for (std::size_t i = 0; i < n_images; ++i) {
        u.images.emplace_back("i" + std::to_string(i), random_representation(rng, dims));
        writer.add_image({u.images.back().first, "media/i" + std::to_string(i) + ".jpg"}, u.images.back().second);
    }
    for (std::size_t j = 0; j < n_descriptions; ++j) {
        u.descriptions.emplace_back("d" + std::to_string(j), random_representation(rng, dims));
        writer.add_description({u.descriptions.back().first, "caption number " + std::to_string(j),
                                n_images ? std::optional<std::string>("i" + std::to_string(j % n_images)) : std::nullopt},
                               u.descriptions.back().second);
    }
    u.manifest = writer.write(u.dir->path(), /*require_links=*/n_images > 0);
    u.store = store::RepresentationStore::open(u.manifest);
    return u;
}

// --- generated queries -------------------------------------------------------

/// Short scene descriptions in plain English, at most 12 tokens.
inline std::string english_query(SplitMix64& rng) {
    static const char* det[] = {"a", "the", "two", "three", "an old", "a young", "a small", "a large", "some", "many"};
    static const char* adj[] = {"red", "black", "white", "happy", "wooden", "tall", "little", "brown",
                                "green", "busy", "empty", "striped", "fluffy", "shiny", "quiet"};
    static const char* noun[] = {"man", "woman", "dog", "cat", "horse", "bus", "train", "kitchen", "table",
                                 "street", "boat", "bird", "child", "bicycle", "pizza", "zebra", "giraffe",
                                 "clock", "umbrella", "tree", "house", "car", "plate", "phone", "window"};
    static const char* verb[] = {"riding", "holding", "sitting on", "standing near", "walking along", "eating",
                                 "looking at", "playing with", "parked beside", "flying over", "lying under",
                                 "running through"};
    static const char* tail[] = {"in the park", "on the beach", "at night", "near the river", "in a city",
                                 "during the day", "next to a fence", "in the snow", "on a sunny day", ""};
    std::string q = std::string(det[rng.below(10)]) + " " + adj[rng.below(15)] + " " + noun[rng.below(25)] + " " +
                    verb[rng.below(12)] + " " + det[rng.below(10)] + " " + noun[rng.below(25)];
    const std::string t = tail[rng.below(10)];
    return t.empty() ? q : q + " " + t;
}

/// A query in another language or script, or emoji only.
inline std::string foreign_query(SplitMix64& rng) {
    static const char* pool[] = {
        "一个男人在骑马",
        "两只狗在公园里玩球",
        "남자가 말을 타고 있다",
        "해변에서 뛰는 개",
        "ένας άνδρας ιππεύει ένα άλογο",
        "μια ζέβρα τρώει γρασίδι",
        "мужчина едет на лошади",
        "馬に乗っている男性",
        "🐴🏇",
        "🍕🍕😋",
        "un chat noir dort sur le toit de la maison",
        "ein Hund spielt mit einem Ball im Garten",
        "un perro corre en la playa con su dueño",
        "una donna con un cappello rosso cammina per la strada",
        "um menino brincando com o cachorro no parque",
        "een vrouw fietst door de stad met haar hond",
    };
    std::string q = pool[rng.below(std::size(pool))];
    // vary the text so queries are not all identical
    if (rng.below(2)) q += " " + std::string(pool[rng.below(std::size(pool))]);
    return q;
}

/// English prose of `tokens` whitespace tokens.
inline std::string long_english_query(SplitMix64& rng, std::size_t tokens) {
    std::string out;
    std::size_t n = 0;
    while (n < tokens) {
        std::string sentence = english_query(rng);
        std::size_t pos = 0;
        while (n < tokens && pos < sentence.size()) {
            const auto end = std::min(sentence.find(' ', pos), sentence.size());
            if (!out.empty()) out += ' ';
            out.append(sentence, pos, end - pos);
            ++n;
            pos = end + 1;
        }
    }
    return out;
}

}  // namespace xmodal::testing
