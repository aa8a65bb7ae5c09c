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

// Layer-0 DAG ledger. Independent layer-1 branches, one per block type tag,
// share a single time-ordered DAG. Every data block links to the newest
// block of its own type and to one pseudorandomly chosen earlier one.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "flexichain/bytes.hpp"
#include "flexichain/crypto.hpp"
#include "flexichain/error.hpp"
#include "flexichain/identity.hpp"

namespace flexi::dag {

/// Block type identifier. Tag 0 ("A") is reserved for virtual existence
/// blocks; data branches are allocated "B", "C", ... in registration order.
struct BlockTypeTag {
  std::uint32_t value = 0;

  std::string name() const {
    if (value < 26) return std::string(1, static_cast<char>('A' + value));
    return "T" + std::to_string(value);
  }

  auto operator<=>(const BlockTypeTag&) const = default;
};

inline constexpr BlockTypeTag kVirtualExistenceTag{0};

struct Transaction {
  crypto::PublicKey sender{};
  BlockTypeTag tag;
  Bytes payload;
  std::uint64_t timestamp = 0;
  crypto::Signature signature{};

  Bytes signing_bytes() const {
    Writer w;
    w.field(sender).u64(tag.value).field(payload).u64(timestamp);
    return std::move(w).take();
  }

  Bytes serialize() const {
    Writer w;
    w.field(signing_bytes()).field(signature);
    return std::move(w).take();
  }

  static Transaction deserialize(ByteView bytes) {
    Reader outer(bytes);
    auto body = outer.field();
    Transaction t;
    auto sig = outer.field();
    outer.expect_done();
    if (sig.size() != t.signature.size()) fail(ErrorCode::Malformed, "signature length");
    std::copy(sig.begin(), sig.end(), t.signature.begin());
    Reader r(body);
    auto sender = r.field();
    if (sender.size() != t.sender.size()) fail(ErrorCode::Malformed, "sender length");
    std::copy(sender.begin(), sender.end(), t.sender.begin());
    t.tag.value = static_cast<std::uint32_t>(r.u64());
    t.payload = r.bytes();
    t.timestamp = r.u64();
    r.expect_done();
    return t;
  }

  Digest digest() const { return crypto::sha256(serialize()); }

  bool verify() const { return crypto::verify(sender, signing_bytes(), signature); }

  bool operator==(const Transaction&) const = default;
};

inline Transaction make_transaction(const crypto::KeyPair& key, BlockTypeTag tag, Bytes payload,
                                    std::uint64_t timestamp) {
  Transaction t{key.public_key, tag, std::move(payload), timestamp, {}};
  t.signature = crypto::sign(key.secret_key, t.signing_bytes());
  return t;
}

/// Binary Merkle tree over SHA-256; an odd node is paired with itself. The
/// root of a single leaf is the leaf; the root of no leaves is all-zero.
inline Digest merkle_root(std::vector<Digest> level) {
  if (level.empty()) return kZeroDigest;
  while (level.size() > 1) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      const Digest& left = level[i];
      const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
      next.push_back(crypto::sha256({left, right}));
    }
    level = std::move(next);
  }
  return level.front();
}

struct NarrationEntry {
  identity::TokenizedUid authenticator;
  Digest narration_digest{};

  bool operator==(const NarrationEntry&) const = default;
};

struct DataBlock {
  BlockTypeTag tag;
  crypto::PublicKey sender{};
  std::vector<Transaction> transactions;
  Digest tx_root{};
  Digest prev_same_type{};
  Digest random_arc{};
  std::vector<NarrationEntry> narration;
  std::uint64_t timestamp = 0;
  Digest header_digest{};

  /// Header commitment. Narration is excluded so the block keeps its
  /// identity while authenticators accumulate.
  Bytes serialize_header() const {
    Writer w;
    w.u64(tag.value).field(sender).field(tx_root).field(prev_same_type).field(random_arc).u64(timestamp);
    return std::move(w).take();
  }

  Digest compute_header() const { return crypto::sha256(serialize_header()); }

  Digest narration_head() const { return narration.empty() ? kZeroDigest : narration.back().narration_digest; }

  bool has_authenticator(const identity::TokenizedUid& tuid) const {
    return std::any_of(narration.begin(), narration.end(),
                       [&](const NarrationEntry& e) { return e.authenticator == tuid; });
  }

  Bytes serialize() const {
    Writer txs;
    for (const auto& t : transactions) txs.field(t.serialize());
    Writer narr;
    for (const auto& n : narration) narr.field(n.authenticator.bytes).field(n.narration_digest);
    Writer w;
    w.field(serialize_header()).field(txs.bytes()).field(narr.bytes()).field(header_digest);
    return std::move(w).take();
  }

  static DataBlock deserialize(ByteView bytes) {
    Reader outer(bytes);
    auto header = outer.field();
    auto txs = outer.field();
    auto narr = outer.field();
    DataBlock b;
    b.header_digest = outer.digest();
    outer.expect_done();

    Reader h(header);
    b.tag.value = static_cast<std::uint32_t>(h.u64());
    auto sender = h.field();
    if (sender.size() != b.sender.size()) fail(ErrorCode::Malformed, "sender length");
    std::copy(sender.begin(), sender.end(), b.sender.begin());
    b.tx_root = h.digest();
    b.prev_same_type = h.digest();
    b.random_arc = h.digest();
    b.timestamp = h.u64();
    h.expect_done();

    Reader t(txs);
    while (!t.done()) b.transactions.push_back(Transaction::deserialize(t.field()));
    Reader n(narr);
    while (!n.done()) {
      NarrationEntry e;
      e.authenticator.bytes = n.digest();
      e.narration_digest = n.digest();
      b.narration.push_back(e);
    }
    return b;
  }

  bool operator==(const DataBlock&) const = default;
};

/// Next link of the chain of narration.
inline Digest next_narration_digest(const Digest& previous, const identity::TokenizedUid& authenticator) {
  return crypto::sha256({previous, authenticator.bytes});
}

/// True iff every narration link hashes from its predecessor and no
/// authenticator appears twice.
inline bool narration_intact(const DataBlock& block) {
  Digest prev = kZeroDigest;
  std::set<identity::TokenizedUid> seen;
  for (const auto& e : block.narration) {
    if (!seen.insert(e.authenticator).second) return false;
    if (next_narration_digest(prev, e.authenticator) != e.narration_digest) return false;
    prev = e.narration_digest;
  }
  return true;
}

struct TimeWindow {
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // inclusive
};

/// Collects the pool transactions of (sender, tag) inside the window,
/// ordered by (timestamp, digest). Arcs and header are left unset.
inline DataBlock build_candidate_block(const std::vector<Transaction>& pool, const crypto::PublicKey& sender,
                                       BlockTypeTag tag, TimeWindow window) {
  std::vector<std::pair<Digest, const Transaction*>> picked;
  for (const auto& tx : pool) {
    if (tx.sender != sender || tx.tag != tag || tx.timestamp < window.start || tx.timestamp > window.end) continue;
    if (!tx.verify()) fail(ErrorCode::BadSignature, "pool transaction signature does not verify");
    picked.emplace_back(tx.digest(), &tx);
  }
  if (picked.empty()) fail(ErrorCode::NoTransactions, "no transactions for sender/tag in window");
  std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second->timestamp, a.first) < std::tie(b.second->timestamp, b.first);
  });

  DataBlock block;
  block.tag = tag;
  block.sender = sender;
  block.timestamp = window.end;
  std::vector<Digest> leaves;
  for (const auto& [digest, tx] : picked) {
    block.transactions.push_back(*tx);
    leaves.push_back(digest);
  }
  block.tx_root = merkle_root(std::move(leaves));
  return block;
}

struct BranchInfo {
  std::string branch_id;
  Digest genesis_digest{};
};

class BranchRegistry {
 public:
  BranchRegistry() { branches_.emplace(kVirtualExistenceTag, BranchInfo{"virtual-existence", kZeroDigest}); }

  /// Allocates the next tag for a new layer-1 branch.
  BlockTypeTag register_branch(const std::string& branch_id, const Digest& genesis_digest) {
    for (const auto& [tag, info] : branches_) {
      if (info.branch_id == branch_id) fail(ErrorCode::DuplicateBranch, "branch '" + branch_id + "' exists");
    }
    BlockTypeTag tag{static_cast<std::uint32_t>(branches_.size())};
    branches_.emplace(tag, BranchInfo{branch_id, genesis_digest});
    return tag;
  }

  void set_virtual_existence_genesis(const Digest& d) { branches_.at(kVirtualExistenceTag).genesis_digest = d; }

  const BranchInfo& at(BlockTypeTag tag) const {
    auto it = branches_.find(tag);
    if (it == branches_.end()) fail(ErrorCode::UnknownBranch, "tag " + tag.name() + " is not registered");
    return it->second;
  }

  std::optional<BlockTypeTag> find(const std::string& branch_id) const {
    for (const auto& [tag, info] : branches_) {
      if (info.branch_id == branch_id) return tag;
    }
    return std::nullopt;
  }

  bool contains(BlockTypeTag tag) const { return branches_.count(tag) != 0; }
  /// Tag the next registration will receive.
  BlockTypeTag register_branch_preview() const { return {static_cast<std::uint32_t>(branches_.size())}; }
  std::size_t size() const noexcept { return branches_.size(); }
  const std::map<BlockTypeTag, BranchInfo>& branches() const noexcept { return branches_; }

 private:
  std::map<BlockTypeTag, BranchInfo> branches_;
};

struct Arcs {
  Digest prev_same_type{};
  Digest random_arc{};

  bool operator==(const Arcs&) const = default;
};

/// Big-endian integer value of `d`, reduced modulo `m` (0 < m < 2^56).
inline std::uint64_t digest_mod(const Digest& d, std::uint64_t m) {
  if (m == 0 || m >= (std::uint64_t{1} << 56)) fail(ErrorCode::DomainError, "modulus out of range");
  std::uint64_t r = 0;
  for (auto b : d) r = ((r << 8) | b) % m;
  return r;
}

/// The layer-0 ledger. A value type: copies are independent snapshots.
class Layer0Ledger {
 public:
  Layer0Ledger() = default;

  /// Records the NodeChain genesis as the first record of type A.
  explicit Layer0Ledger(const Digest& virtual_existence_genesis, std::uint64_t timestamp) {
    registry_.set_virtual_existence_genesis(virtual_existence_genesis);
    push_genesis(kVirtualExistenceTag, virtual_existence_genesis, timestamp);
  }

  BlockTypeTag register_branch(const std::string& branch_id, const Digest& genesis_digest, std::uint64_t timestamp) {
    if (index_.count(genesis_digest) != 0) fail(ErrorCode::DuplicateBranch, "genesis digest already in ledger");
    auto tag = registry_.register_branch(branch_id, genesis_digest);
    push_genesis(tag, genesis_digest, timestamp);
    return tag;
  }

  /// Deterministic arc selection for a candidate of a registered data type.
  Arcs select_parents(const DataBlock& candidate) const {
    registry_.at(candidate.tag);
    auto it = by_tag_.find(candidate.tag);
    if (it == by_tag_.end() || it->second.empty()) fail(ErrorCode::UnknownBranch, "branch has no genesis");
    const auto& ancestors = it->second;
    Arcs arcs;
    arcs.prev_same_type = blocks_[ancestors.back()].header_digest;
    arcs.random_arc = blocks_[ancestors[digest_mod(candidate.tx_root, ancestors.size())]].header_digest;
    return arcs;
  }

  /// Fills arcs, bumps the timestamp past both arc targets, seals the header.
  DataBlock seal(DataBlock candidate) const {
    if (candidate.tag == kVirtualExistenceTag) fail(ErrorCode::InvalidBlock, "type A is reserved");
    auto arcs = select_parents(candidate);
    candidate.prev_same_type = arcs.prev_same_type;
    candidate.random_arc = arcs.random_arc;
    const auto floor = std::max(at(arcs.prev_same_type).timestamp, at(arcs.random_arc).timestamp) + 1;
    candidate.timestamp = std::max(candidate.timestamp, floor);
    candidate.header_digest = candidate.compute_header();
    return candidate;
  }

  /// Appends a sealed block after re-checking every structural invariant.
  void append(const DataBlock& block) {
    if (block.tag == kVirtualExistenceTag) fail(ErrorCode::InvalidBlock, "type A is reserved");
    registry_.at(block.tag);
    if (block.transactions.empty()) fail(ErrorCode::NoTransactions, "data block without transactions");
    std::vector<Digest> leaves;
    for (const auto& tx : block.transactions) {
      if (tx.sender != block.sender || tx.tag != block.tag) {
        fail(ErrorCode::InvalidBlock, "transaction sender/tag differs from block");
      }
      if (!tx.verify()) fail(ErrorCode::BadSignature, "transaction signature does not verify");
      leaves.push_back(tx.digest());
    }
    if (merkle_root(std::move(leaves)) != block.tx_root) fail(ErrorCode::InvalidBlock, "tx_root mismatch");
    if (select_parents(block) != Arcs{block.prev_same_type, block.random_arc}) {
      fail(ErrorCode::InvalidBlock, "arcs do not match parent selection");
    }
    if (block.timestamp <= at(block.prev_same_type).timestamp || block.timestamp <= at(block.random_arc).timestamp) {
      fail(ErrorCode::InvalidBlock, "block is not later than its arc targets");
    }
    if (block.compute_header() != block.header_digest) fail(ErrorCode::InvalidBlock, "header_digest mismatch");
    if (index_.count(block.header_digest) != 0) fail(ErrorCode::InvalidBlock, "duplicate block");
    push(block);
  }

  const DataBlock& at(const Digest& digest) const {
    auto it = index_.find(digest);
    if (it == index_.end()) fail(ErrorCode::InvalidBlock, "unknown block " + to_hex(digest));
    return blocks_[it->second];
  }

  /// Mutable access for narration updates. Header fields must not change.
  DataBlock& narration_target(const Digest& digest) {
    auto it = index_.find(digest);
    if (it == index_.end()) fail(ErrorCode::InvalidBlock, "unknown block " + to_hex(digest));
    return blocks_[it->second];
  }

  bool contains(const Digest& digest) const { return index_.count(digest) != 0; }

  const std::vector<DataBlock>& blocks() const noexcept { return blocks_; }
  const BranchRegistry& registry() const noexcept { return registry_; }

  /// Number of records that carry transactions (excludes branch geneses).
  std::size_t data_block_count() const {
    return static_cast<std::size_t>(
        std::count_if(blocks_.begin(), blocks_.end(), [](const DataBlock& b) { return !b.transactions.empty(); }));
  }

  Bytes serialize() const {
    Writer w;
    for (const auto& [tag, info] : registry_.branches()) {
      Writer r;
      r.u64(tag.value).field(info.branch_id).field(info.genesis_digest);
      w.field(r.bytes());
    }
    Writer blocks;
    for (const auto& b : blocks_) blocks.field(b.serialize());
    Writer out;
    out.field(w.bytes()).field(blocks.bytes());
    return std::move(out).take();
  }

  /// Rebuilds a ledger by replaying registrations and appends in stored
  /// order; every data block is re-validated.
  static Layer0Ledger deserialize(ByteView bytes) {
    Reader outer(bytes);
    Reader branches(outer.field());
    Reader blocks(outer.field());
    outer.expect_done();
    std::map<std::uint32_t, BranchInfo> infos;
    while (!branches.done()) {
      Reader r(branches.field());
      const auto tag = static_cast<std::uint32_t>(r.u64());
      BranchInfo info;
      const auto id = r.bytes();
      info.branch_id.assign(id.begin(), id.end());
      info.genesis_digest = r.digest();
      r.expect_done();
      infos.emplace(tag, std::move(info));
    }
    Layer0Ledger l;
    bool first = true;
    while (!blocks.done()) {
      auto b = DataBlock::deserialize(blocks.field());
      if (!b.transactions.empty()) {
        auto narration = std::move(b.narration);
        b.narration.clear();
        l.append(b);
        l.narration_target(b.header_digest).narration = std::move(narration);
        continue;
      }
      auto it = infos.find(b.tag.value);
      if (it == infos.end() || it->second.genesis_digest != b.header_digest) {
        fail(ErrorCode::Malformed, "genesis record without a matching branch");
      }
      if (first) {
        if (b.tag != kVirtualExistenceTag) fail(ErrorCode::Malformed, "first record must be the type-A genesis");
        l = Layer0Ledger(b.header_digest, b.timestamp);
      } else if (l.registry().register_branch_preview() != b.tag) {
        fail(ErrorCode::Malformed, "branch genesis out of registration order");
      } else {
        l.register_branch(it->second.branch_id, b.header_digest, b.timestamp);
      }
      first = false;
    }
    if (first) fail(ErrorCode::Malformed, "empty ledger");
    return l;
  }

 private:
  void push_genesis(BlockTypeTag tag, const Digest& digest, std::uint64_t timestamp) {
    DataBlock g;
    g.tag = tag;
    g.timestamp = timestamp;
    g.header_digest = digest;
    push(g);
  }

  void push(const DataBlock& block) {
    index_.emplace(block.header_digest, blocks_.size());
    by_tag_[block.tag].push_back(blocks_.size());
    blocks_.push_back(block);
  }

  BranchRegistry registry_;
  std::vector<DataBlock> blocks_;
  std::map<Digest, std::size_t> index_;
  std::map<BlockTypeTag, std::vector<std::size_t>> by_tag_;
};

/// Time-consensus order: ascending (timestamp, header_digest).
inline std::vector<Digest> topological_order(const Layer0Ledger& ledger) {
  std::vector<std::pair<std::uint64_t, Digest>> keys;
  keys.reserve(ledger.blocks().size());
  for (const auto& b : ledger.blocks()) keys.emplace_back(b.timestamp, b.header_digest);
  std::sort(keys.begin(), keys.end());
  std::vector<Digest> out;
  out.reserve(keys.size());
  for (auto& k : keys) out.push_back(k.second);
  return out;
}

/// Trace export, one record per block in topological order:
///   <digest> <tag> <prev_same_type> <random_arc> <timestamp> <tx_count> <narration_len>
inline std::string export_text(const Layer0Ledger& ledger) {
  std::ostringstream os;
  os << "# flexichain-dag v1\n";
  os << "# digest tag prev_same_type random_arc timestamp tx_count narration_len\n";
  for (const auto& d : topological_order(ledger)) {
    const auto& b = ledger.at(d);
    os << to_hex(b.header_digest) << ' ' << b.tag.name() << ' ' << to_hex(b.prev_same_type) << ' '
       << to_hex(b.random_arc) << ' ' << b.timestamp << ' ' << b.transactions.size() << ' ' << b.narration.size()
       << '\n';
  }
  return os.str();
}

}  // namespace flexi::dag
