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
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/core/utf8.hpp"
#include "xmodal/providers/language_profiles.hpp"
#include "xmodal/providers/types.hpp"

namespace xmodal::providers {

enum class Script { None, Latin, Han, Kana, Hangul, Greek, Cyrillic, Arabic, Hebrew, Thai, Devanagari };

inline Script script_of(char32_t c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return Script::Latin;
    if (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7) return Script::Latin;
    if (c >= 0x1E00 && c <= 0x1EFF) return Script::Latin;
    if ((c >= 0x370 && c <= 0x3FF) || (c >= 0x1F00 && c <= 0x1FFF)) return Script::Greek;
    if (c >= 0x400 && c <= 0x52F) return Script::Cyrillic;
    if (c >= 0x590 && c <= 0x5FF) return Script::Hebrew;
    if (c >= 0x600 && c <= 0x6FF) return Script::Arabic;
    if (c >= 0x900 && c <= 0x97F) return Script::Devanagari;
    if (c >= 0xE00 && c <= 0xE7F) return Script::Thai;
    if ((c >= 0x1100 && c <= 0x11FF) || (c >= 0x3130 && c <= 0x318F) || (c >= 0xAC00 && c <= 0xD7AF))
        return Script::Hangul;
    if ((c >= 0x3040 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF)) return Script::Kana;
    if ((c >= 0x3400 && c <= 0x4DBF) || (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0xF900 && c <= 0xFAFF) ||
        (c >= 0x20000 && c <= 0x2FA1F))
        return Script::Han;
    return Script::None;
}

/// Language identification contract. Implementations throw EmptyText on
/// blank input and otherwise always return a code.
class LanguageDetector {
public:
    virtual ~LanguageDetector() = default;
    virtual DetectedLanguage detect(std::string_view text) const = 0;
};

/// Script detection for non-Latin text, then rank-order n-gram profile
/// matching among the bundled Latin-script languages. Text without letters
/// (digits, punctuation, emoji) is "und".
class NgramLanguageDetector final : public LanguageDetector {
public:
    static constexpr std::size_t kProfileSize = 600;
    static constexpr std::size_t kMaxGram = 4;
    static constexpr double kAsciiEnglishSlack = 1.05;

    NgramLanguageDetector() {
        for (const auto& corpus : detail::kProfileCorpora)
            profiles_.push_back({std::string(corpus.lang), rank_table(ranked_grams(decode_utf8(corpus.text)))});
    }

    DetectedLanguage detect(std::string_view text) const override {
        if (is_blank(text)) fail(ErrorCode::EmptyText, "cannot detect the language of empty text");
        const std::u32string cps = decode_utf8(text);

        std::map<Script, double> weight;
        for (char32_t c : cps) {
            const Script s = script_of(c);
            if (s == Script::None) continue;
            // one ideograph or syllable carries roughly a word's worth of text
            const bool dense = s == Script::Han || s == Script::Kana || s == Script::Hangul;
            weight[s] += dense ? 3.0 : 1.0;
        }
        if (weight.empty()) return {"und", 1.0};

        double total = 0;
        for (const auto& [s, w] : weight) total += w;
        const auto dominant = std::max_element(weight.begin(), weight.end(),
                                               [](const auto& a, const auto& b) { return a.second < b.second; });
        const double share = dominant->second / total;

        switch (dominant->first) {
            case Script::Han: return {weight.count(Script::Kana) ? "ja" : "zh", share};
            case Script::Kana: return {"ja", share};
            case Script::Hangul: return {"ko", share};
            case Script::Greek: return {"el", share};
            case Script::Cyrillic: return {"ru", share};
            case Script::Arabic: return {"ar", share};
            case Script::Hebrew: return {"he", share};
            case Script::Thai: return {"th", share};
            case Script::Devanagari: return {"hi", share};
            case Script::Latin:
            case Script::None: break;
        }
        return classify_latin(cps, share);
    }

    std::vector<std::string> latin_languages() const {
        std::vector<std::string> out;
        for (const auto& p : profiles_) out.push_back(p.lang);
        return out;
    }

private:
    using RankTable = std::unordered_map<std::string, std::size_t>;

    struct Profile {
        std::string lang;
        RankTable ranks;
    };

    static char32_t fold(char32_t c) {
        if (c >= 'A' && c <= 'Z') return c + 32;
        if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
        return c;
    }

    /// The most frequent 1..kMaxGram-grams of the '_'-padded words, most
    /// frequent first, ties in byte order.
    static std::vector<std::string> ranked_grams(const std::u32string& text) {
        std::unordered_map<std::string, std::size_t> counts;
        std::u32string word;
        auto flush = [&] {
            if (word.empty()) return;
            const std::u32string padded = U"_" + word + U"_";
            for (std::size_t n = 1; n <= kMaxGram; ++n)
                for (std::size_t i = 0; i + n <= padded.size(); ++i) {
                    if (n == 1 && padded[i] == U'_') continue;
                    ++counts[encode_utf8(std::u32string_view(padded).substr(i, n))];
                }
            word.clear();
        };
        for (char32_t c : text) {
            if (script_of(c) == Script::Latin)
                word.push_back(fold(c));
            else
                flush();
        }
        flush();

        std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (sorted.size() > kProfileSize) sorted.resize(kProfileSize);
        std::vector<std::string> out;
        out.reserve(sorted.size());
        for (auto& [gram, count] : sorted) out.push_back(std::move(gram));
        return out;
    }

    static RankTable rank_table(const std::vector<std::string>& grams) {
        RankTable t;
        for (std::size_t i = 0; i < grams.size(); ++i) t.emplace(grams[i], i);
        return t;
    }

    DetectedLanguage classify_latin(const std::u32string& cps, double share) const {
        const auto doc = ranked_grams(cps);
        std::vector<std::pair<std::size_t, std::size_t>> distances;  // (distance, profile index)
        for (std::size_t p = 0; p < profiles_.size(); ++p) {
            std::size_t d = 0;
            for (std::size_t i = 0; i < doc.size(); ++i) {
                const auto it = profiles_[p].ranks.find(doc[i]);
                d += it == profiles_[p].ranks.end() ? kProfileSize : (it->second > i ? it->second - i : i - it->second);
            }
            distances.emplace_back(d, p);
        }
        std::sort(distances.begin(), distances.end());
        // near ties on plain ASCII go to English, the pipeline's no-op branch
        const bool ascii = std::all_of(cps.begin(), cps.end(), [](char32_t c) { return c < 0x80; });
        if (ascii && profiles_[distances[0].second].lang != "en") {
            for (std::size_t i = 1; i < distances.size(); ++i) {
                if (profiles_[distances[i].second].lang != "en") continue;
                if (static_cast<double>(distances[i].first) <= static_cast<double>(distances[0].first) * kAsciiEnglishSlack)
                    std::rotate(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(i),
                                distances.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                break;
            }
        }
        const double best = static_cast<double>(distances[0].first);
        const double second = distances.size() > 1 ? static_cast<double>(distances[1].first) : best;
        const double margin = second > 0 ? std::max(0.0, second - best) / second : 0.0;
        return {profiles_[distances[0].second].lang, share * std::min(1.0, 0.5 + margin * 5.0)};
    }

    std::vector<Profile> profiles_;
};

/// Shared instance; profiles are built once on first use.
inline const NgramLanguageDetector& default_language_detector() {
    static const NgramLanguageDetector detector;
    return detector;
}

inline DetectedLanguage detect_language(std::string_view text) { return default_language_detector().detect(text); }

/// Returns fixed answers for listed texts and defers to another detector
/// otherwise.
class MockLanguageDetector final : public LanguageDetector {
public:
    explicit MockLanguageDetector(const LanguageDetector& fallback = default_language_detector())
        : fallback_(&fallback) {}

    void set(std::string text, std::string lang) { table_[std::move(text)] = std::move(lang); }

    DetectedLanguage detect(std::string_view text) const override {
        if (is_blank(text)) fail(ErrorCode::EmptyText, "cannot detect the language of empty text");
        if (const auto it = table_.find(std::string(text)); it != table_.end()) return {it->second, 1.0};
        return fallback_->detect(text);
    }

private:
    const LanguageDetector* fallback_;
    std::map<std::string, std::string> table_;
};

}  // namespace xmodal::providers
