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

// Thin wrappers over libsodium: SHA-256, scrypt and Ed25519.

#include <sodium.h>

#include <array>
#include <cstdint>
#include <initializer_list>

#include "flexichain/bytes.hpp"
#include "flexichain/error.hpp"

namespace flexi::crypto {

using PublicKey = std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES>;
using SecretKey = std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES>;
using Signature = std::array<std::uint8_t, crypto_sign_BYTES>;

inline void ensure_init() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) fail(ErrorCode::IoError, "libsodium failed to initialise");
}

inline Digest sha256(ByteView data) {
  ensure_init();
  Digest out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

/// SHA-256 over the concatenation of `parts`, without materialising it.
inline Digest sha256(std::initializer_list<ByteView> parts) {
  ensure_init();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  for (auto p : parts) crypto_hash_sha256_update(&st, p.data(), p.size());
  Digest out;
  crypto_hash_sha256_final(&st, out.data());
  return out;
}

/// Raw scrypt (Percival). `cost` is N and must be a power of two > 1.
inline Bytes scrypt(ByteView password, ByteView salt, std::uint64_t cost,
                    std::uint32_t block_size, std::uint32_t parallelism,
                    std::size_t output_length) {
  ensure_init();
  if (cost < 2 || (cost & (cost - 1)) != 0) fail(ErrorCode::InvalidKdf, "cost must be a power of two > 1");
  if (block_size == 0 || parallelism == 0 || output_length == 0) {
    fail(ErrorCode::InvalidKdf, "block_size, parallelism and output_length must be positive");
  }
  Bytes out(output_length);
  // libsodium rejects zero-length buffers by pointer; give it a valid one.
  static const std::uint8_t kEmpty = 0;
  const auto* pw = password.empty() ? &kEmpty : password.data();
  const auto* sl = salt.empty() ? &kEmpty : salt.data();
  if (crypto_pwhash_scryptsalsa208sha256_ll(pw, password.size(), sl, salt.size(), cost,
                                            block_size, parallelism, out.data(), out.size()) != 0) {
    fail(ErrorCode::InvalidKdf, "scrypt rejected parameters (memory limit?)");
  }
  return out;
}

struct KeyPair {
  PublicKey public_key{};
  SecretKey secret_key{};
};

/// Deterministic Ed25519 key pair from a 32-byte seed.
inline KeyPair keypair_from_seed(const Digest& seed) {
  ensure_init();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  return kp;
}

inline Signature sign(const SecretKey& sk, ByteView message) {
  ensure_init();
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.data());
  return sig;
}

inline bool verify(const PublicKey& pk, ByteView message, ByteView signature) {
  ensure_init();
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     pk.data()) == 0;
}

inline bool is_valid_public_key(ByteView pk) {
  ensure_init();
  return pk.size() == crypto_sign_PUBLICKEYBYTES && crypto_core_ed25519_is_valid_point(pk.data()) == 1;
}

inline PublicKey public_key_from(ByteView bytes) {
  if (!is_valid_public_key(bytes)) fail(ErrorCode::InvalidParameters, "not a valid Ed25519 public key");
  PublicKey pk;
  std::copy(bytes.begin(), bytes.end(), pk.begin());
  return pk;
}

/// Equality whose running time depends only on the lengths.
inline bool constant_time_equal(ByteView a, ByteView b) noexcept {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace flexi::crypto
