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

// NodeChain: the linked ledger of virtual existence blocks, one per enrolled
// node, and the Virtual Existence State (VES) that tracks its version.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flexichain/bytes.hpp"
#include "flexichain/crypto.hpp"
#include "flexichain/identity.hpp"
#include "flexichain/vault.hpp"

namespace flexi::nodechain {

struct VirtualExistenceBlock {
  identity::TokenizedUid tuid;
  Bytes constructed_public_key;
  Digest prev_link{};
  std::uint64_t nns_index = 0;  // 1-based chain position
  std::uint64_t timestamp = 0;  // virtual milliseconds
  Digest extrinsic_digest{};
  Digest header_digest{};

  /// Canonical encoding of every field except header_digest.
  Bytes serialize_body() const {
    Writer w;
    w.field(tuid.bytes).field(constructed_public_key).field(prev_link).u64(nns_index).u64(timestamp).field(
        extrinsic_digest);
    return std::move(w).take();
  }

  Digest compute_header() const { return crypto::sha256(serialize_body()); }

  Bytes serialize() const {
    Writer w;
    w.field(serialize_body()).field(header_digest);
    return std::move(w).take();
  }

  static VirtualExistenceBlock deserialize(ByteView bytes) {
    Reader outer(bytes);
    auto body = outer.field();
    VirtualExistenceBlock b;
    b.header_digest = outer.digest();
    outer.expect_done();
    Reader r(body);
    b.tuid.bytes = r.digest();
    b.constructed_public_key = r.bytes();
    b.prev_link = r.digest();
    b.nns_index = r.u64();
    b.timestamp = r.u64();
    b.extrinsic_digest = r.digest();
    r.expect_done();
    return b;
  }

  bool operator==(const VirtualExistenceBlock&) const = default;
};

/// Builds a block and seals its header.
inline VirtualExistenceBlock make_virtual_block(const identity::TokenizedUid& tuid, Bytes constructed_public_key,
                                                const Digest& prev_link, std::uint64_t nns_index,
                                                std::uint64_t timestamp, const Digest& extrinsic_digest) {
  VirtualExistenceBlock b{tuid, std::move(constructed_public_key), prev_link, nns_index, timestamp,
                          extrinsic_digest, {}};
  b.header_digest = b.compute_header();
  return b;
}

/// Virtual Existence State. The index doubles as the NNS counter.
struct VesState {
  std::uint64_t index = 0;
  Digest head_digest{};

  bool operator==(const VesState&) const = default;
};

enum class ViolationKind { LinkBreak, HeaderMismatch, TokenMismatch, IndexGap };

constexpr std::string_view to_string(ViolationKind k) noexcept {
  switch (k) {
    case ViolationKind::LinkBreak: return "LinkBreak";
    case ViolationKind::HeaderMismatch: return "HeaderMismatch";
    case ViolationKind::TokenMismatch: return "TokenMismatch";
    case ViolationKind::IndexGap: return "IndexGap";
  }
  return "?";
}

struct Violation {
  std::uint64_t index = 0;  // 1-based
  ViolationKind kind{};

  bool operator==(const Violation&) const = default;
};

struct HeaderAlert {
  std::uint64_t index = 0;
  Digest changed_digest{};
};

struct GenesisResult {
  identity::Uid uid;
  identity::TokenizedUid tuid;
  Digest extrinsic_digest{};
};

class NodeChainLedger {
 public:
  NodeChainLedger() = default;

  /// Loads blocks without validating them; run verify_chain afterwards.
  static NodeChainLedger from_blocks(std::vector<VirtualExistenceBlock> blocks) {
    NodeChainLedger l;
    l.blocks_ = std::move(blocks);
    if (!l.blocks_.empty()) l.ves_ = {l.blocks_.size(), l.blocks_.back().header_digest};
    return l;
  }

  /// Creates the backup node's virtual block. Valid once per ledger.
  GenesisResult genesis(const identity::ExtrinsicParameters& bn_params, const identity::KdfParameters& kdf,
                        ByteView token_salt, std::uint64_t timestamp) {
    if (!blocks_.empty()) fail(ErrorCode::AlreadyInitialized, "NodeChain already has a genesis block");
    auto containers = identity::hash_extrinsic(bn_params);
    auto uid = identity::derive_uid(containers.container1, identity::Uid::zero(kdf.output_length), kdf);
    auto tuid = identity::tokenize_uid(uid, token_salt);
    append(make_virtual_block(tuid, containers.container2, kZeroDigest, 1, timestamp, containers.container1));
    return {std::move(uid), tuid, containers.container1};
  }

  /// The only mutation. Requires the block to extend the current VES.
  VesState append(const VirtualExistenceBlock& block) {
    if (block.nns_index != ves_.index + 1) {
      fail(ErrorCode::StaleState, "block nns_index " + std::to_string(block.nns_index) + " does not follow VES " +
                                      std::to_string(ves_.index));
    }
    if (block.prev_link != ves_.head_digest) fail(ErrorCode::IntegrityViolation, "prev_link does not match VES head");
    if (block.compute_header() != block.header_digest) {
      fail(ErrorCode::IntegrityViolation, "header_digest does not verify");
    }
    blocks_.push_back(block);
    ves_ = {ves_.index + 1, block.header_digest};
    return ves_;
  }

  const std::vector<VirtualExistenceBlock>& blocks() const noexcept { return blocks_; }
  const VesState& ves() const noexcept { return ves_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }

  /// Block at a 1-based enrollment index.
  const VirtualExistenceBlock& at(std::uint64_t index) const {
    if (index == 0 || index > blocks_.size()) fail(ErrorCode::UnknownNode, "no block at index " + std::to_string(index));
    return blocks_[index - 1];
  }

  std::optional<std::uint64_t> index_of(const identity::TokenizedUid& tuid) const {
    for (const auto& b : blocks_) {
      if (b.tuid == tuid) return b.nns_index;
    }
    return std::nullopt;
  }

  /// TUIDs in enrollment order.
  std::vector<identity::TokenizedUid> roster() const {
    std::vector<identity::TokenizedUid> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.tuid);
    return out;
  }

  Bytes serialize() const {
    Writer w;
    for (const auto& b : blocks_) w.field(b.serialize());
    return std::move(w).take();
  }

  static NodeChainLedger deserialize(ByteView bytes) {
    std::vector<VirtualExistenceBlock> blocks;
    Reader r(bytes);
    while (!r.done()) blocks.push_back(VirtualExistenceBlock::deserialize(r.field()));
    return from_blocks(std::move(blocks));
  }

 private:
  std::vector<VirtualExistenceBlock> blocks_;
  VesState ves_;
};

/// Checks for full verification mode: the vault copy and KDF needed to
/// recompute every token.
struct FullVerification {
  const vault::Vault& vault;
  const identity::KdfParameters& kdf;
};

/// Returns the first violation, or nullopt when the chain is intact.
/// Link-only mode when `full` is absent.
inline std::optional<Violation> verify_chain(const NodeChainLedger& ledger,
                                             const std::optional<FullVerification>& full = std::nullopt) {
  if (ledger.empty()) fail(ErrorCode::EmptyChain, "nothing to verify");
  Digest expected_prev = kZeroDigest;
  auto prev_uid = full ? identity::Uid::zero(full->kdf.output_length) : identity::Uid{};
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const auto& b = ledger.blocks()[i];
    const std::uint64_t pos = i + 1;
    if (b.nns_index != pos) return Violation{pos, ViolationKind::IndexGap};
    if (b.prev_link != expected_prev) return Violation{pos, ViolationKind::LinkBreak};
    if (b.compute_header() != b.header_digest) return Violation{pos, ViolationKind::HeaderMismatch};
    if (full) {
      auto entry = full->vault.lookup(b.tuid, vault::AccessContext::Local);
      if (!entry || entry->enrollment_index != pos || entry->extrinsic_digest != b.extrinsic_digest ||
          !identity::match_layer(b.tuid, entry->real_uid, full->vault.token_salt())) {
        return Violation{pos, ViolationKind::TokenMismatch};
      }
      auto uid = identity::derive_uid(b.extrinsic_digest, prev_uid, full->kdf);
      if (!(uid == entry->real_uid)) return Violation{pos, ViolationKind::TokenMismatch};
      prev_uid = std::move(uid);
    }
    expected_prev = b.header_digest;
  }
  if (ledger.ves().index != ledger.size() || ledger.ves().head_digest != ledger.blocks().back().header_digest) {
    return Violation{ledger.size(), ViolationKind::IndexGap};
  }
  return std::nullopt;
}

/// Compares a node's freshly reported parameters against its stored digest.
inline std::optional<HeaderAlert> detect_header_change(const NodeChainLedger& ledger, std::uint64_t index,
                                                       const identity::ExtrinsicParameters& reported) {
  const auto& block = ledger.at(index);
  auto digest = identity::hash_extrinsic(reported).container1;
  if (digest == block.extrinsic_digest) return std::nullopt;
  return HeaderAlert{index, digest};
}

}  // namespace flexi::nodechain
