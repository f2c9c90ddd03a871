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

/*
 * NPY version 1.0 reading and writing.
 *
 * Layout of a file:
 *
 *   offset 0   "\x93NUMPY"
 *   offset 6   major, minor version bytes (only 1.0 is accepted)
 *   offset 8   little-endian uint16 header length HLEN
 *   offset 10  ASCII python dict literal, space padded, '\n' terminated:
 *                {'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }
 *   offset 10 + HLEN   raw payload; 10 + HLEN is a multiple of 64
 *
 * Only the three keys above are allowed. The payload is product(shape)
 * elements of the declared type, C or Fortran order.
 */

#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/core/error.hpp"
#include "xmodal/store/half.hpp"

namespace xmodal::store {

inline constexpr std::string_view kNpyMagic{"\x93NUMPY", 6};
inline constexpr std::size_t kNpyPreambleSize = 10;
inline constexpr std::size_t kNpyAlignment = 64;

enum class ElementType { Float16, Float32, Float64, Other };

struct TensorFileHeader {
    std::string dtype;  // e.g. "<f4"
    bool fortran_order = false;
    std::vector<std::size_t> shape;
    std::size_t data_offset = 0;

    std::size_t element_size() const {
        std::size_t size = 0;
        for (std::size_t i = 2; i < dtype.size(); ++i) size = size * 10 + static_cast<std::size_t>(dtype[i] - '0');
        return size;
    }

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }

    std::size_t payload_bytes() const { return element_count() * element_size(); }

    /// Little-endian (or byte-order-free) floating point types only.
    ElementType element_type() const {
        if (dtype.size() != 3 || (dtype[0] != '<' && dtype[0] != '|' && dtype[0] != '=')) return ElementType::Other;
        if (dtype[1] != 'f') return ElementType::Other;
        switch (dtype[2]) {
            case '2': return ElementType::Float16;
            case '4': return ElementType::Float32;
            case '8': return ElementType::Float64;
            default: return ElementType::Other;
        }
    }
};

namespace detail {

/// Tokenizer for the restricted python literal grammar used by NPY headers.
class HeaderDictParser {
public:
    explicit HeaderDictParser(std::string_view text) : text_(text) {}

    TensorFileHeader parse() {
        TensorFileHeader header;
        bool have_descr = false, have_order = false, have_shape = false;

        expect('{');
        while (true) {
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                break;
            }
            const std::string key = parse_string();
            expect(':');
            if (key == "descr") {
                if (have_descr) bad("duplicate key 'descr'");
                header.dtype = parse_string();
                have_descr = true;
            } else if (key == "fortran_order") {
                if (have_order) bad("duplicate key 'fortran_order'");
                header.fortran_order = parse_bool();
                have_order = true;
            } else if (key == "shape") {
                if (have_shape) bad("duplicate key 'shape'");
                header.shape = parse_shape();
                have_shape = true;
            } else {
                bad("unexpected key '" + key + "'");
            }
            skip_ws();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != '}') {
                bad("expected ',' or '}'");
            }
        }
        skip_ws();
        if (pos_ != text_.size()) bad("trailing characters after header dict");
        if (!have_descr || !have_order || !have_shape) bad("header dict lacks descr, fortran_order or shape");
        if (!valid_descr(header.dtype)) bad("unsupported descr '" + header.dtype + "'");
        return header;
    }

private:
    [[noreturn]] void bad(const std::string& what) const {
        fail(ErrorCode::MalformedHeader, what + " at header offset " + std::to_string(pos_));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n')) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) bad(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string parse_string() {
        skip_ws();
        const char quote = peek();
        if (quote != '\'' && quote != '"') bad("expected string literal");
        ++pos_;
        const auto end = text_.find(quote, pos_);
        if (end == std::string_view::npos) bad("unterminated string literal");
        std::string out(text_.substr(pos_, end - pos_));
        pos_ = end + 1;
        return out;
    }

    bool parse_bool() {
        skip_ws();
        if (text_.substr(pos_, 4) == "True") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "False") {
            pos_ += 5;
            return false;
        }
        bad("expected True or False");
    }

    std::vector<std::size_t> parse_shape() {
        expect('(');
        std::vector<std::size_t> dims;
        bool trailing_comma = false;
        while (true) {
            skip_ws();
            if (peek() == ')') {
                ++pos_;
                break;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) bad("expected non-negative integer in shape");
            std::size_t value = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                const auto digit = static_cast<std::size_t>(peek() - '0');
                if (value > (SIZE_MAX - digit) / 10) bad("shape dimension overflows");
                value = value * 10 + digit;
                ++pos_;
            }
            dims.push_back(value);
            skip_ws();
            trailing_comma = false;
            if (peek() == ',') {
                ++pos_;
                trailing_comma = true;
            } else if (peek() != ')') {
                bad("expected ',' or ')' in shape");
            }
        }
        // python needs "(n,)" for a one-tuple; "(n)" is just an int
        if (dims.size() == 1 && !trailing_comma) bad("one-element shape must be written as (n,)");
        return dims;
    }

    static bool valid_descr(std::string_view d) {
        if (d.size() < 3) return false;
        if (d[0] != '<' && d[0] != '>' && d[0] != '|' && d[0] != '=') return false;
        if (!std::isalpha(static_cast<unsigned char>(d[1]))) return false;
        for (std::size_t i = 2; i < d.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
        return d[2] != '0';
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::string format_header_dict(std::string_view dtype, bool fortran_order,
                                      std::span<const std::size_t> shape) {
    std::string dict = "{'descr': '";
    dict += dtype;
    dict += "', 'fortran_order': ";
    dict += fortran_order ? "True" : "False";
    dict += ", 'shape': (";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) dict += ", ";
        dict += std::to_string(shape[i]);
    }
    if (shape.size() == 1) dict += ",";
    dict += "), }";
    return dict;
}

}  // namespace detail

/// Parses the preamble and header dict of an NPY v1.0 file. `bytes` must
/// start at file offset 0; it may be truncated after the header.
inline TensorFileHeader parse_npy_header(std::span<const std::byte> bytes) {
    if (bytes.size() < kNpyMagic.size() ||
        std::memcmp(bytes.data(), kNpyMagic.data(), kNpyMagic.size()) != 0) {
        fail(ErrorCode::BadMagic, "not an NPY file");
    }
    if (bytes.size() < kNpyPreambleSize) fail(ErrorCode::MalformedHeader, "truncated preamble");

    const auto major = std::to_integer<unsigned>(bytes[6]);
    const auto minor = std::to_integer<unsigned>(bytes[7]);
    if (major != 1 || minor != 0) {
        fail(ErrorCode::UnsupportedVersion,
             "NPY version " + std::to_string(major) + "." + std::to_string(minor) + " (only 1.0 is supported)");
    }

    const std::size_t header_len =
        std::to_integer<std::size_t>(bytes[8]) | (std::to_integer<std::size_t>(bytes[9]) << 8);
    const std::size_t data_offset = kNpyPreambleSize + header_len;
    if (bytes.size() < data_offset) fail(ErrorCode::MalformedHeader, "header length exceeds input");
    if (data_offset % kNpyAlignment != 0) {
        fail(ErrorCode::MalformedHeader, "payload offset " + std::to_string(data_offset) + " is not 64-byte aligned");
    }

    const std::string_view text(reinterpret_cast<const char*>(bytes.data()) + kNpyPreambleSize, header_len);
    if (header_len == 0 || text.back() != '\n') fail(ErrorCode::MalformedHeader, "header is not newline terminated");

    TensorFileHeader header = detail::HeaderDictParser(text).parse();
    header.data_offset = data_offset;
    return header;
}

/// Builds preamble + padded header. `min_total` reserves room so the shape
/// can later grow in place (see rewrite_npy_shape).
inline std::string make_npy_header(std::string_view dtype, bool fortran_order,
                                   std::span<const std::size_t> shape, std::size_t min_total = 128) {
    std::string dict = detail::format_header_dict(dtype, fortran_order, shape);
    std::size_t total = kNpyPreambleSize + dict.size() + 1;
    total = (total + kNpyAlignment - 1) / kNpyAlignment * kNpyAlignment;
    if (total < min_total) total = (min_total + kNpyAlignment - 1) / kNpyAlignment * kNpyAlignment;
    const std::size_t header_len = total - kNpyPreambleSize;
    if (header_len > 0xffff) fail(ErrorCode::MalformedHeader, "header too large for NPY 1.0");

    std::string out(kNpyMagic);
    out.push_back('\x01');
    out.push_back('\x00');
    out.push_back(static_cast<char>(header_len & 0xff));
    out.push_back(static_cast<char>((header_len >> 8) & 0xff));
    out += dict;
    out.append(header_len - dict.size() - 1, ' ');
    out.push_back('\n');
    return out;
}

inline void write_npy(const std::filesystem::path& path, std::string_view dtype,
                      std::span<const std::size_t> shape, std::span<const std::byte> payload,
                      bool fortran_order = false) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Internal, "cannot create " + path.string());
    const std::string header = make_npy_header(dtype, fortran_order, shape);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) fail(ErrorCode::Internal, "short write to " + path.string());
}

/// Writes float values as "<f4" or "<f2" (converted with round-to-nearest-even).
inline void write_npy_floats(const std::filesystem::path& path, std::string_view dtype,
                             std::span<const std::size_t> shape, std::span<const float> values) {
    if (dtype == "<f4") {
        write_npy(path, dtype, shape, std::as_bytes(values));
    } else if (dtype == "<f2") {
        std::vector<std::uint16_t> halves(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) halves[i] = float_to_half(values[i]);
        write_npy(path, dtype, shape, std::as_bytes(std::span<const std::uint16_t>(halves)));
    } else {
        fail(ErrorCode::DtypeMismatch, "cannot write floats as '" + std::string(dtype) + "'");
    }
}

/// Replaces the header of an existing file with one declaring `shape`,
/// keeping the payload offset. Fails if the new dict does not fit.
inline void rewrite_npy_shape(const std::filesystem::path& path, std::span<const std::size_t> shape) {
    std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
    if (!io) fail(ErrorCode::MissingFile, "cannot open " + path.string());
    std::string preamble(kNpyPreambleSize, '\0');
    io.read(preamble.data(), static_cast<std::streamsize>(preamble.size()));
    const std::size_t header_len = static_cast<unsigned char>(preamble[8]) |
                                   (static_cast<std::size_t>(static_cast<unsigned char>(preamble[9])) << 8);
    std::string rest(header_len, '\0');
    io.read(rest.data(), static_cast<std::streamsize>(rest.size()));
    if (!io) fail(ErrorCode::MalformedHeader, "truncated header in " + path.string());
    const std::string full = preamble + rest;
    const auto old = parse_npy_header(std::as_bytes(std::span(full.data(), full.size())));

    const std::string header = make_npy_header(old.dtype, old.fortran_order, shape, old.data_offset);
    if (header.size() != old.data_offset) {
        fail(ErrorCode::MalformedHeader, "new shape does not fit the reserved header of " + path.string());
    }
    io.seekp(0);
    io.write(header.data(), static_cast<std::streamsize>(header.size()));
    io.flush();
    if (!io) fail(ErrorCode::Internal, "cannot rewrite header of " + path.string());
}

/// Whole-file array decoded to floats; used by tooling and tests, never on
/// the serving path (which maps files instead).
struct FloatArray {
    TensorFileHeader header;
    std::vector<float> values;
};

inline void decode_floats(const TensorFileHeader& header, std::span<const std::byte> payload, float* out) {
    const std::size_t n = header.element_count();
    switch (header.element_type()) {
        case ElementType::Float32: std::memcpy(out, payload.data(), n * sizeof(float)); break;
        case ElementType::Float16:
            for (std::size_t i = 0; i < n; ++i) {
                std::uint16_t h;
                std::memcpy(&h, payload.data() + 2 * i, 2);
                out[i] = half_to_float(h);
            }
            break;
        case ElementType::Float64:
            for (std::size_t i = 0; i < n; ++i) {
                double d;
                std::memcpy(&d, payload.data() + 8 * i, 8);
                out[i] = static_cast<float>(d);
            }
            break;
        case ElementType::Other: fail(ErrorCode::DtypeMismatch, "'" + header.dtype + "' is not a float type");
    }
}

inline FloatArray read_npy_floats(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto bytes = std::as_bytes(std::span<const char>(raw));
    FloatArray array;
    array.header = parse_npy_header(bytes);
    const std::size_t payload_bytes = array.header.payload_bytes();
    if (bytes.size() - array.header.data_offset != payload_bytes) {
        fail(ErrorCode::ShapeMismatch, path.string() + ": payload is " +
                                           std::to_string(bytes.size() - array.header.data_offset) +
                                           " bytes, header declares " + std::to_string(payload_bytes));
    }
    array.values.resize(array.header.element_count());
    decode_floats(array.header, bytes.subspan(array.header.data_offset), array.values.data());
    return array;
}

}  // namespace xmodal::store
