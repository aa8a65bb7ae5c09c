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

// Node identity: extrinsic parameters, the UID generator (SHA-256 feeding
// scrypt), tokenization and the match layer.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "flexichain/bytes.hpp"
#include "flexichain/crypto.hpp"
#include "flexichain/error.hpp"

namespace flexi::identity {

inline constexpr std::size_t kMacLength = 6;
inline constexpr std::size_t kDefaultUidLength = 128;

/// Manufacturing and constructed identity values a node reveals at enrollment.
struct ExtrinsicParameters {
  Bytes mac_address;        // 6 bytes
  Digest firmware_digest{};
  Bytes puf_signature;      // synthetic SRAM-PUF response
  std::uint32_t process_power_class = 0;
  Bytes location_tag;
  Bytes ip_address;         // 4 (IPv4) or 16 (IPv6) bytes
  Bytes constructed_public_id;

  /// Throws InvalidParameters on any malformed field.
  void validate() const {
    if (mac_address.size() != kMacLength) fail(ErrorCode::InvalidParameters, "mac_address must be 6 bytes");
    if (puf_signature.empty()) fail(ErrorCode::InvalidParameters, "puf_signature is empty");
    if (location_tag.empty()) fail(ErrorCode::InvalidParameters, "location_tag is empty");
    if (ip_address.size() != 4 && ip_address.size() != 16) {
      fail(ErrorCode::InvalidParameters, "ip_address must be 4 or 16 bytes");
    }
    if (!crypto::is_valid_public_key(constructed_public_id)) {
      fail(ErrorCode::InvalidParameters, "constructed_public_id is not a valid public key");
    }
  }

  /// Canonical encoding of every field except constructed_public_id.
  Bytes serialize_manufacturing() const {
    Writer w;
    w.field(mac_address)
        .field(firmware_digest)
        .field(puf_signature)
        .u64(process_power_class)
        .field(location_tag)
        .field(ip_address);
    return std::move(w).take();
  }

  Bytes serialize() const {
    Writer w;
    w.field(serialize_manufacturing()).field(constructed_public_id);
    return std::move(w).take();
  }

  bool operator==(const ExtrinsicParameters&) const = default;
};

/// The two request containers: the extrinsic digest and the constructed ID.
struct ExtrinsicContainers {
  Digest container1{};
  Bytes container2;
};

inline ExtrinsicContainers hash_extrinsic(const ExtrinsicParameters& params) {
  params.validate();
  return {crypto::sha256(params.serialize_manufacturing()), params.constructed_public_id};
}

/// scrypt configuration. Network-secret; never serialized into a block or
/// message.
struct KdfParameters {
  std::uint64_t cost = 1u << 14;
  std::uint32_t block_size = 8;
  std::uint32_t parallelism = 1;
  Bytes salt;
  std::size_t output_length = kDefaultUidLength;

  void validate() const {
    if (cost < 2 || (cost & (cost - 1)) != 0) fail(ErrorCode::InvalidKdf, "cost must be a power of two > 1");
    if (block_size == 0) fail(ErrorCode::InvalidKdf, "block_size must be positive");
    if (parallelism == 0) fail(ErrorCode::InvalidKdf, "parallelism must be positive");
    if (output_length == 0) fail(ErrorCode::InvalidKdf, "output_length must be positive");
  }
};

/// Real node identity. Length equals the configured KDF output length.
class Uid {
 public:
  Uid() = default;
  explicit Uid(Bytes bytes) : bytes_(std::move(bytes)) {}

  /// Anchor used as the previous UID of the genesis derivation.
  static Uid zero(std::size_t length) { return Uid(Bytes(length, 0)); }

  const Bytes& bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return bytes_.size(); }

  bool operator==(const Uid&) const = default;

 private:
  Bytes bytes_;
};

/// On-chain token of a UID: SHA-256(uid || token salt).
struct TokenizedUid {
  Digest bytes{};

  auto operator<=>(const TokenizedUid&) const = default;
  std::string hex() const { return to_hex(bytes); }
};

inline Uid derive_uid(const Digest& container1, const Uid& prev_uid, const KdfParameters& kdf) {
  kdf.validate();
  if (prev_uid.size() != kdf.output_length) {
    fail(ErrorCode::InvalidParameters, "previous UID length differs from KDF output length");
  }
  const Digest password = crypto::sha256({container1, prev_uid.bytes()});
  return Uid(crypto::scrypt(password, kdf.salt, kdf.cost, kdf.block_size, kdf.parallelism,
                            kdf.output_length));
}

inline TokenizedUid tokenize_uid(const Uid& uid, ByteView token_salt) {
  if (uid.size() == 0) fail(ErrorCode::InvalidParameters, "empty UID");
  return {crypto::sha256({uid.bytes(), token_salt})};
}

/// True iff `uid` tokenizes to `tuid`. The comparison does not exit early.
inline bool match_layer(const TokenizedUid& tuid, const Uid& uid, ByteView token_salt) {
  if (uid.size() == 0) return false;
  const auto candidate = crypto::sha256({uid.bytes(), token_salt});
  return crypto::constant_time_equal(candidate, tuid.bytes);
}

/// A trusted hardware module's signing identity.
struct TrustedModuleCredential {
  std::string module_id;
  crypto::PublicKey public_key{};
  crypto::SecretKey private_key{};
};

/// Genesis registry of trusted module public keys. Each module may bind
/// exactly one enrollment.
class TrustedModuleRegistry {
 public:
  void add(const std::string& module_id, const crypto::PublicKey& key) {
    if (!keys_.emplace(module_id, key).second) {
      fail(ErrorCode::DuplicateIdentity, "module '" + module_id + "' already registered");
    }
  }

  bool contains(const std::string& module_id) const { return keys_.count(module_id) != 0; }

  std::optional<crypto::PublicKey> key_of(const std::string& module_id) const {
    auto it = keys_.find(module_id);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
  }

  bool consumed(const std::string& module_id) const { return consumed_.count(module_id) != 0; }
  void mark_consumed(const std::string& module_id) { consumed_[module_id] = true; }

  std::size_t size() const noexcept { return keys_.size(); }

 private:
  std::map<std::string, crypto::PublicKey> keys_;
  std::map<std::string, bool> consumed_;
};

}  // namespace flexi::identity
