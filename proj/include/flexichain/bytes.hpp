/*
 * Copyright 2026 The FlexiChain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexichain/error.hpp"

namespace flexi {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte SHA-256 output. Value type, ordered lexicographically.
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

inline ByteView as_view(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_view(s);
  return {v.begin(), v.end()};
}

template <typename... Views>
Bytes concat(const Views&... parts) {
  Bytes out;
  out.reserve((std::size(parts) + ... + 0));
  (out.insert(out.end(), std::begin(parts), std::end(parts)), ...);
  return out;
}

inline std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    fail(ErrorCode::Malformed, "non-hex character in '" + std::string(hex) + "'");
  };
  if (hex.size() % 2 != 0) fail(ErrorCode::Malformed, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

inline Digest digest_from(ByteView bytes) {
  if (bytes.size() != 32) fail(ErrorCode::Malformed, "expected 32 bytes");
  Digest d;
  std::copy(bytes.begin(), bytes.end(), d.begin());
  return d;
}

/// Canonical encoder: every field is a 4-byte big-endian length followed by
/// the raw field bytes. Integers are written as 8-byte big-endian fields.
class Writer {
 public:
  Writer& field(ByteView bytes) {
    put_u32(static_cast<std::uint32_t>(bytes.size()));
    out_.insert(out_.end(), bytes.begin(), bytes.end());
    return *this;
  }

  Writer& field(std::string_view s) { return field(as_view(s)); }

  Writer& u64(std::uint64_t value) {
    std::array<std::uint8_t, 8> be{};
    for (int i = 7; i >= 0; --i) {
      be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
      value >>= 8;
    }
    return field(be);
  }

  const Bytes& bytes() const& noexcept { return out_; }
  Bytes take() && noexcept { return std::move(out_); }

 private:
  void put_u32(std::uint32_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 24));
    out_.push_back(static_cast<std::uint8_t>(v >> 16));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }

  Bytes out_;
};

/// Decoder matching `Writer`. Any truncation or length mismatch throws
/// `ErrorCode::Malformed`.
class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  ByteView field() {
    if (in_.size() - pos_ < 4) fail(ErrorCode::Malformed, "truncated length prefix");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | in_[pos_++];
    if (in_.size() - pos_ < len) fail(ErrorCode::Malformed, "truncated field");
    auto view = in_.subspan(pos_, len);
    pos_ += len;
    return view;
  }

  Bytes bytes() {
    auto v = field();
    return {v.begin(), v.end()};
  }

  Digest digest() { return digest_from(field()); }

  std::uint64_t u64() {
    auto v = field();
    if (v.size() != 8) fail(ErrorCode::Malformed, "integer field must be 8 bytes");
    std::uint64_t out = 0;
    for (auto b : v) out = (out << 8) | b;
    return out;
  }

  bool done() const noexcept { return pos_ == in_.size(); }

  void expect_done() const {
    if (!done()) fail(ErrorCode::Malformed, "trailing bytes");
  }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace flexi
