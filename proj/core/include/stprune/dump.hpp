// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stprune/token_set.hpp"

namespace stprune::dump {

/// Binary layout, all integers and floats little-endian:
///   "STPRUNE1" | u32 frame_count | frames...
///   frame: u32 N | u32 D | u8 flags (bit0: raw attention present)
///          | N*D f32 features (row-major) | D f32 cls | [N f32 attention]
/// The binary form has no frame ids; frames are numbered by position.
inline constexpr std::string_view kMagic = "STPRUNE1";
inline constexpr std::uint8_t kFlagAttention = 0x01;

/// Text twin: a JSON document {"format": "stprune-text-1", "frames": [...]}
/// with frame_id, timestamp, features (array of rows), cls and optional
/// attention per frame.
inline constexpr std::string_view kTextFormat = "stprune-text-1";

enum class Format { binary, text };

std::string encode_binary(std::span<const TokenSet> frames);
std::string encode_text(std::span<const TokenSet> frames);

/// Detects the format by the magic prefix. Counts are checked against the
/// remaining payload before anything proportional to them is allocated.
/// Throws Error(malformed_dump) on any structural problem.
std::vector<TokenSet> decode(std::string_view bytes);

std::vector<TokenSet> read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so a failed write never leaves
/// a partial file behind.
void write_file(const std::filesystem::path& path, std::span<const TokenSet> frames, Format format = Format::binary);

/// Shared atomic write helper, also used for selection files.
void write_bytes_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace stprune::dump
