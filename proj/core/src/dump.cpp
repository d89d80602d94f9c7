// SPDX-License-Identifier: Apache-2.0

#include "stprune/dump.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "stprune/error.hpp"

namespace stprune::dump {

namespace {

using json = nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed_dump, what); }

template <typename T>
T from_le(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::ranges::reverse(bytes);
        return std::bit_cast<T>(bytes);
    }
    return v;
}

template <typename T>
void put(std::string& out, T v) {
    v = from_le(v);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

void put_floats(std::string& out, std::span<const float> values) {
    for (float v : values) {
        put(out, v);
    }
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : m_bytes(bytes) {}

    std::size_t remaining() const noexcept { return m_bytes.size() - m_pos; }

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, m_bytes.data() + m_pos, sizeof(T));
        m_pos += sizeof(T);
        return from_le(v);
    }

    void get_floats(std::span<float> out) {
        need(out.size() * sizeof(float));
        for (auto& v : out) {
            std::memcpy(&v, m_bytes.data() + m_pos, sizeof(float));
            v = from_le(v);
            m_pos += sizeof(float);
        }
    }

    void need(std::size_t n) const {
        if (n > remaining()) {
            malformed("unexpected end of dump");
        }
    }

    void skip(std::size_t n) {
        need(n);
        m_pos += n;
    }

private:
    std::string_view m_bytes;
    std::size_t m_pos = 0;
};

void check_finite(std::span<const float> values) {
    for (float v : values) {
        if (!std::isfinite(v)) {
            malformed("dump contains non-finite values");
        }
    }
}

std::vector<TokenSet> decode_binary(std::string_view bytes) {
    Reader in(bytes);
    in.skip(kMagic.size());
    const auto frame_count = in.get<std::uint32_t>();
    constexpr std::size_t kFrameHeader = 9;
    if (frame_count == 0) {
        malformed("dump declares zero frames");
    }
    if (static_cast<std::uint64_t>(frame_count) * kFrameHeader > in.remaining()) {
        malformed("frame count exceeds payload");
    }
    std::vector<TokenSet> frames;
    frames.reserve(frame_count);
    for (std::uint32_t f = 0; f < frame_count; ++f) {
        const auto n = in.get<std::uint32_t>();
        const auto d = in.get<std::uint32_t>();
        const auto flags = in.get<std::uint8_t>();
        if (n == 0 || d == 0) {
            malformed("frame " + std::to_string(f) + " has zero tokens or zero width");
        }
        if ((flags & ~kFlagAttention) != 0) {
            malformed("frame " + std::to_string(f) + " has unknown flag bits");
        }
        const bool has_attention = (flags & kFlagAttention) != 0;
        // u64 arithmetic: u32*u32 + u32 + u32 floats cannot overflow.
        const std::uint64_t floats = std::uint64_t{n} * d + d + (has_attention ? n : 0);
        if (floats > in.remaining() / sizeof(float)) {
            malformed("frame " + std::to_string(f) + " payload exceeds file size");
        }
        TokenSet frame;
        frame.frame_id = f;
        frame.timestamp = f;
        frame.features = Matrix(n, d);
        in.get_floats(frame.features.data());
        frame.cls.resize(d);
        in.get_floats(frame.cls);
        if (has_attention) {
            frame.attention.emplace(n);
            in.get_floats(*frame.attention);
        }
        check_finite(frame.features.data());
        check_finite(frame.cls);
        if (frame.attention) {
            check_finite(*frame.attention);
        }
        frames.push_back(std::move(frame));
    }
    if (in.remaining() != 0) {
        malformed("trailing bytes after last frame");
    }
    return frames;
}

std::vector<float> float_array(const json& j, const char* what) {
    if (!j.is_array()) {
        malformed(std::string(what) + " must be an array");
    }
    std::vector<float> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) {
            malformed(std::string(what) + " must contain numbers");
        }
        out.push_back(v.get<float>());
    }
    check_finite(out);
    return out;
}

std::vector<TokenSet> decode_text(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        malformed(std::string("text dump is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kTextFormat || !doc.contains("frames") ||
        !doc["frames"].is_array() || doc["frames"].empty()) {
        malformed("text dump needs format \"stprune-text-1\" and a non-empty frames array");
    }
    std::vector<TokenSet> frames;
    std::size_t position = 0;
    for (const auto& jf : doc["frames"]) {
        if (!jf.is_object() || !jf.contains("features") || !jf.contains("cls")) {
            malformed("each frame needs features and cls");
        }
        TokenSet frame;
        frame.frame_id = jf.value("frame_id", static_cast<std::uint64_t>(position));
        frame.timestamp = jf.value("timestamp", frame.frame_id);
        const auto& rows = jf["features"];
        if (!rows.is_array() || rows.empty()) {
            malformed("features must be a non-empty array of rows");
        }
        std::vector<float> flat;
        std::size_t width = 0;
        for (const auto& r : rows) {
            auto row = float_array(r, "feature row");
            if (width == 0) {
                width = row.size();
            }
            if (row.empty() || row.size() != width) {
                malformed("feature rows must be non-empty and equally wide");
            }
            flat.insert(flat.end(), row.begin(), row.end());
        }
        frame.features = Matrix(rows.size(), width, std::move(flat));
        frame.cls = float_array(jf["cls"], "cls");
        if (frame.cls.size() != width) {
            malformed("cls length differs from feature width");
        }
        if (jf.contains("attention") && !jf["attention"].is_null()) {
            frame.attention = float_array(jf["attention"], "attention");
            if (frame.attention->size() != frame.size()) {
                malformed("attention length differs from token count");
            }
        }
        frames.push_back(std::move(frame));
        ++position;
    }
    return frames;
}

}  // namespace

std::string encode_binary(std::span<const TokenSet> frames) {
    std::string out(kMagic);
    put(out, static_cast<std::uint32_t>(frames.size()));
    for (const auto& f : frames) {
        put(out, static_cast<std::uint32_t>(f.size()));
        put(out, static_cast<std::uint32_t>(f.dim()));
        put(out, static_cast<std::uint8_t>(f.attention ? kFlagAttention : 0));
        put_floats(out, f.features.data());
        put_floats(out, f.cls);
        if (f.attention) {
            put_floats(out, *f.attention);
        }
    }
    return out;
}

std::string encode_text(std::span<const TokenSet> frames) {
    nlohmann::ordered_json doc;
    doc["format"] = kTextFormat;
    doc["frames"] = nlohmann::ordered_json::array();
    for (const auto& f : frames) {
        nlohmann::ordered_json jf;
        jf["frame_id"] = f.frame_id;
        jf["timestamp"] = f.timestamp;
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto r = f.features.row(i);
            rows.push_back(std::vector<float>(r.begin(), r.end()));
        }
        jf["features"] = std::move(rows);
        jf["cls"] = f.cls;
        if (f.attention) {
            jf["attention"] = *f.attention;
        }
        doc["frames"].push_back(std::move(jf));
    }
    return doc.dump(1) + "\n";
}

std::vector<TokenSet> decode(std::string_view bytes) {
    if (bytes.starts_with(kMagic)) {
        return decode_binary(bytes);
    }
    return decode_text(bytes);
}

std::vector<TokenSet> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "failed reading " + path.string());
    }
    return decode(bytes);
}

void write_bytes_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error(ErrorCode::io_error, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::io_error, "cannot move output into place: " + ec.message());
    }
}

void write_file(const std::filesystem::path& path, std::span<const TokenSet> frames, Format format) {
    write_bytes_atomic(path, format == Format::binary ? encode_binary(frames) : encode_text(frames));
}

}  // namespace stprune::dump
