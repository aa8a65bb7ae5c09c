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

// Offline vault binding real UIDs to their tokens. Access is gated on call
// provenance: only the owning node's local context may read it.

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexichain/bytes.hpp"
#include "flexichain/identity.hpp"

namespace flexi {

enum class NodeRole { BackupNode, EdgeNode, Subscriber, CpsIot };

constexpr std::string_view to_string(NodeRole role) noexcept {
  switch (role) {
    case NodeRole::BackupNode: return "backup";
    case NodeRole::EdgeNode: return "edge";
    case NodeRole::Subscriber: return "subscriber";
    case NodeRole::CpsIot: return "cps";
  }
  return "?";
}

/// BackupNode and EdgeNode hold full ledgers, vault copies and may enroll.
constexpr bool is_full_node(NodeRole role) noexcept {
  return role == NodeRole::BackupNode || role == NodeRole::EdgeNode;
}

}  // namespace flexi

namespace flexi::vault {

/// Where a vault call originates. Remote covers any access performed while
/// handling a network message on behalf of another peer.
enum class AccessContext { Local, Remote };

struct VaultEntry {
  std::uint64_t enrollment_index = 0;  // 1-based
  identity::Uid real_uid;
  identity::TokenizedUid tuid;
  Digest extrinsic_digest{};
  std::string module_id;

  Bytes serialize() const {
    Writer w;
    w.u64(enrollment_index).field(real_uid.bytes()).field(tuid.bytes).field(extrinsic_digest).field(module_id);
    return std::move(w).take();
  }

  static VaultEntry deserialize(ByteView bytes) {
    Reader r(bytes);
    VaultEntry e;
    e.enrollment_index = r.u64();
    e.real_uid = identity::Uid(r.bytes());
    e.tuid.bytes = r.digest();
    e.extrinsic_digest = r.digest();
    auto id = r.field();
    e.module_id.assign(id.begin(), id.end());
    r.expect_done();
    return e;
  }

  bool operator==(const VaultEntry&) const = default;
};

/// Access counters consumed by the offline-gate audit.
struct VaultAudit {
  std::uint64_t local_reads = 0;
  std::uint64_t remote_attempts_blocked = 0;
};

/// Single writer (the owning node); lookups may run concurrently.
class Vault {
 public:
  explicit Vault(Bytes token_salt) : token_salt_(std::move(token_salt)) {}

  // Copies carry the entries but start with a fresh audit.
  Vault(const Vault& other)
      : token_salt_(other.token_salt_), entries_(other.entries_), by_tuid_(other.by_tuid_) {}
  Vault& operator=(const Vault& other) {
    if (this != &other) {
      token_salt_ = other.token_salt_;
      entries_ = other.entries_;
      by_tuid_ = other.by_tuid_;
    }
    return *this;
  }

  /// Appends the next entry. Only full nodes may write.
  void append(const VaultEntry& entry, NodeRole caller) {
    if (!is_full_node(caller)) {
      fail(ErrorCode::Unauthorized, std::string(to_string(caller)) + " node may not write the vault");
    }
    if (entry.enrollment_index != entries_.size() + 1) {
      fail(ErrorCode::IndexGap, "expected index " + std::to_string(entries_.size() + 1) + ", got " +
                                    std::to_string(entry.enrollment_index));
    }
    if (!identity::match_layer(entry.tuid, entry.real_uid, token_salt_)) {
      fail(ErrorCode::ConsistencyViolation, "tuid does not tokenize from real_uid");
    }
    if (by_tuid_.count(entry.tuid) != 0) fail(ErrorCode::DuplicateIdentity, "tuid already present");
    for (const auto& e : entries_) {
      if (e.real_uid == entry.real_uid) fail(ErrorCode::DuplicateIdentity, "real UID already present");
    }
    by_tuid_.emplace(entry.tuid, entries_.size());
    entries_.push_back(entry);
  }

  std::optional<VaultEntry> lookup(const identity::TokenizedUid& tuid, AccessContext ctx) const {
    if (ctx == AccessContext::Remote) {
      ++remote_attempts_blocked_;
      fail(ErrorCode::OfflineViolation, "vault is not reachable from the network");
    }
    ++local_reads_;
    auto it = by_tuid_.find(tuid);
    if (it == by_tuid_.end()) return std::nullopt;
    return entries_[it->second];
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<VaultEntry>& entries() const noexcept { return entries_; }
  const Bytes& token_salt() const noexcept { return token_salt_; }
  VaultAudit audit() const noexcept {
    return {local_reads_.load(), remote_attempts_blocked_.load()};
  }

  /// Persistence format: one length-prefixed field per entry, in order.
  Bytes serialize() const {
    Writer w;
    for (const auto& e : entries_) w.field(e.serialize());
    return std::move(w).take();
  }

  static Vault deserialize(ByteView bytes, Bytes token_salt) {
    Vault v(std::move(token_salt));
    Reader r(bytes);
    while (!r.done()) v.append(VaultEntry::deserialize(r.field()), NodeRole::BackupNode);
    return v;
  }

 private:
  Bytes token_salt_;
  std::vector<VaultEntry> entries_;
  std::map<identity::TokenizedUid, std::size_t> by_tuid_;
  mutable std::atomic<std::uint64_t> local_reads_{0};
  mutable std::atomic<std::uint64_t> remote_attempts_blocked_{0};
};

/// Recomputes UID_i = derive_uid(digest_i, UID_{i-1}) over the vault in
/// enrollment order. Returns the first 1-based index that fails, if any.
inline std::optional<std::uint64_t> verify_enrollment_chain(const Vault& vault,
                                                            const identity::KdfParameters& kdf) {
  auto prev = identity::Uid::zero(kdf.output_length);
  for (const auto& e : vault.entries()) {
    auto expected = identity::derive_uid(e.extrinsic_digest, prev, kdf);
    if (!(expected == e.real_uid)) return e.enrollment_index;
    prev = std::move(expected);
  }
  return std::nullopt;
}

}  // namespace flexi::vault
