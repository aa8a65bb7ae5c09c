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

// Proof of Rapid Authentication: enrollment request/response, block
// authentication through the chain of narration, and finality.

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flexichain/bytes.hpp"
#include "flexichain/crypto.hpp"
#include "flexichain/dag.hpp"
#include "flexichain/identity.hpp"
#include "flexichain/nodechain.hpp"
#include "flexichain/vault.hpp"

namespace flexi::consensus {

using Nonce = std::array<std::uint8_t, 8>;

/// Network-secret configuration shared by full nodes only.
struct NetworkSecrets {
  identity::KdfParameters kdf;
  Bytes token_salt;
};

struct EnrollmentRequest {
  Digest container1{};
  Bytes container2;
  std::string module_id;
  crypto::Signature module_signature{};
  Nonce nonce{};

  Bytes signed_bytes() const {
    Writer w;
    w.field(container1).field(container2);
    return std::move(w).take();
  }

  Bytes serialize() const {
    Writer w;
    w.field(container1).field(container2).field(module_id).field(module_signature).field(nonce);
    return std::move(w).take();
  }

  bool operator==(const EnrollmentRequest&) const = default;
};

/// Broadcast part of an enrollment. The matching vault entry travels only
/// over the local trusted-module channel, never inside this message.
struct EnrollmentResponse {
  nodechain::VirtualExistenceBlock virtual_block;
  nodechain::VesState ves;
  std::uint64_t enrollment_index = 0;

  Bytes serialize() const {
    Writer w;
    w.field(virtual_block.serialize()).u64(ves.index).field(ves.head_digest).u64(enrollment_index);
    return std::move(w).take();
  }
};

struct EnrollmentOutcome {
  EnrollmentResponse response;
  vault::VaultEntry entry;  // offline: replicated locally, handed to the node's module
};

enum class FinalityMode { Exhaustive, Narrated };

constexpr std::string_view to_string(FinalityMode m) noexcept {
  return m == FinalityMode::Exhaustive ? "exhaustive" : "narrated";
}

/// Ledgers held by a BackupNode or EdgeNode.
struct FullNodeState {
  NodeRole role = NodeRole::EdgeNode;
  nodechain::NodeChainLedger chain;
  vault::Vault vault{Bytes{}};
  identity::TrustedModuleRegistry registry;
};

/// Signs both containers with the trusted module key.
inline EnrollmentRequest enroll_request(const identity::ExtrinsicParameters& params,
                                        const identity::TrustedModuleCredential& credential,
                                        const identity::TrustedModuleRegistry& registry, const Nonce& nonce) {
  if (!registry.contains(credential.module_id)) {
    fail(ErrorCode::UnknownModule, "module '" + credential.module_id + "' is not in the genesis registry");
  }
  auto containers = identity::hash_extrinsic(params);
  EnrollmentRequest req{containers.container1, std::move(containers.container2), credential.module_id, {}, nonce};
  req.module_signature = crypto::sign(credential.private_key, req.signed_bytes());
  return req;
}

/// Creates the backup node's genesis block and vault entry.
inline identity::Uid bootstrap_genesis(FullNodeState& bn, const identity::ExtrinsicParameters& bn_params,
                                       const std::string& bn_module_id, const NetworkSecrets& secrets,
                                       std::uint64_t timestamp) {
  if (bn.role != NodeRole::BackupNode) fail(ErrorCode::Unauthorized, "only the backup node creates genesis");
  if (!bn.registry.contains(bn_module_id)) fail(ErrorCode::UnknownModule, "backup node module not registered");
  auto g = bn.chain.genesis(bn_params, secrets.kdf, secrets.token_salt, timestamp);
  bn.vault.append({1, g.uid, g.tuid, g.extrinsic_digest, bn_module_id}, bn.role);
  bn.registry.mark_consumed(bn_module_id);
  return g.uid;
}

/// Runs the UID generator for a joining node and extends NodeChain and the
/// vault of the responder.
inline EnrollmentOutcome enroll_respond(FullNodeState& responder, const EnrollmentRequest& request,
                                        const NetworkSecrets& secrets, std::uint64_t timestamp) {
  if (!is_full_node(responder.role)) {
    fail(ErrorCode::Unauthorized, std::string(to_string(responder.role)) + " nodes cannot answer enrollment");
  }
  if (responder.chain.empty()) fail(ErrorCode::StaleState, "responder has no genesis");
  auto key = responder.registry.key_of(request.module_id);
  if (!key) fail(ErrorCode::UnknownModule, "module '" + request.module_id + "' is not in the genesis registry");
  if (!crypto::verify(*key, request.signed_bytes(), request.module_signature)) {
    fail(ErrorCode::BadSignature, "module signature does not verify");
  }
  if (!crypto::is_valid_public_key(request.container2)) {
    fail(ErrorCode::InvalidParameters, "constructed public ID is not a valid key");
  }
  for (const auto& b : responder.chain.blocks()) {
    if (b.extrinsic_digest == request.container1) fail(ErrorCode::AlreadyEnrolled, "extrinsic digest already enrolled");
  }
  if (responder.registry.consumed(request.module_id)) {
    fail(ErrorCode::ModuleConsumed, "module '" + request.module_id + "' already bound to a node");
  }

  const auto& entries = responder.vault.entries();
  const auto uid = identity::derive_uid(request.container1, entries.back().real_uid, secrets.kdf);
  const auto tuid = identity::tokenize_uid(uid, secrets.token_salt);
  const std::uint64_t index = responder.chain.ves().index + 1;

  vault::VaultEntry entry{index, uid, tuid, request.container1, request.module_id};
  auto block = nodechain::make_virtual_block(tuid, request.container2, responder.chain.ves().head_digest, index,
                                             timestamp, request.container1);
  responder.vault.append(entry, responder.role);
  auto ves = responder.chain.append(block);
  responder.registry.mark_consumed(request.module_id);
  return {{std::move(block), ves, index}, std::move(entry)};
}

/// Applies a broadcast response (and, for full nodes, the locally
/// replicated vault entry) to a replica.
inline void apply_enrollment(FullNodeState& replica, const EnrollmentResponse& response,
                             const vault::VaultEntry& entry) {
  if (entry.enrollment_index != response.enrollment_index || entry.tuid != response.virtual_block.tuid) {
    fail(ErrorCode::ConsistencyViolation, "vault entry does not belong to this response");
  }
  replica.chain.append(response.virtual_block);
  replica.vault.append(entry, replica.role);
  replica.registry.mark_consumed(entry.module_id);
}

/// What an authenticating node brings: its token, the UID held in its
/// trusted hardware, the module credential and its local VES index.
struct Authenticator {
  identity::TokenizedUid tuid;
  identity::Uid hardware_uid;
  identity::TrustedModuleCredential module;
  std::uint64_t local_ves_index = 0;
};

/// The authenticator's local view. `local_vault` is null for nodes that do
/// not hold a vault copy.
struct AuthContext {
  const nodechain::VesState& network_ves;
  const identity::TrustedModuleRegistry& registry;
  const nodechain::NodeChainLedger& chain;
  const vault::Vault* local_vault = nullptr;
  ByteView token_salt;
};

enum class AuthResult { Appended, Duplicate };

/// Bytes the trusted module attests when it authenticates a block.
inline Bytes attestation_bytes(const Digest& block_digest, const identity::TokenizedUid& tuid) {
  Writer w;
  w.field(block_digest).field(tuid.bytes);
  return std::move(w).take();
}

/// Adds the authenticator to the block's chain of narration. Checks run in
/// order: NNS gate, match layer, module registry, module attestation.
inline AuthResult authenticate_block(const Authenticator& auth, dag::DataBlock& block, const AuthContext& ctx) {
  if (auth.local_ves_index != ctx.network_ves.index) {
    fail(ErrorCode::StaleState, "local VES " + std::to_string(auth.local_ves_index) + " != network VES " +
                                    std::to_string(ctx.network_ves.index));
  }

  bool matched = ctx.chain.index_of(auth.tuid).has_value() &&
                 identity::match_layer(auth.tuid, auth.hardware_uid, ctx.token_salt);
  if (matched && ctx.local_vault != nullptr) {
    auto entry = ctx.local_vault->lookup(auth.tuid, vault::AccessContext::Local);
    matched = entry && entry->real_uid == auth.hardware_uid && entry->module_id == auth.module.module_id;
  }
  if (!matched) fail(ErrorCode::IdentityMismatch, "match layer rejected " + auth.tuid.hex());

  auto key = ctx.registry.key_of(auth.module.module_id);
  if (!key) fail(ErrorCode::UnknownModule, "module '" + auth.module.module_id + "' is not registered");
  const auto msg = attestation_bytes(block.header_digest, auth.tuid);
  if (!crypto::verify(*key, msg, crypto::sign(auth.module.private_key, msg))) {
    fail(ErrorCode::BadSignature, "module attestation does not verify");
  }

  if (block.has_authenticator(auth.tuid)) return AuthResult::Duplicate;
  block.narration.push_back({auth.tuid, dag::next_narration_digest(block.narration_head(), auth.tuid)});
  return AuthResult::Appended;
}

/// Exhaustive: every roster member has authenticated. Narrated: the
/// `latest` most recently enrolled members have authenticated.
inline bool check_finality(const dag::DataBlock& block, const std::vector<identity::TokenizedUid>& roster,
                           FinalityMode mode, std::size_t latest = 1) {
  if (roster.empty()) fail(ErrorCode::EmptyRoster, "finality needs a roster");
  if (mode == FinalityMode::Exhaustive) {
    std::set<identity::TokenizedUid> want(roster.begin(), roster.end());
    std::set<identity::TokenizedUid> have;
    for (const auto& e : block.narration) have.insert(e.authenticator);
    return want == have;
  }
  latest = std::clamp<std::size_t>(latest, 1, roster.size());
  for (std::size_t i = roster.size() - latest; i < roster.size(); ++i) {
    if (!block.has_authenticator(roster[i])) return false;
  }
  return true;
}

/// Network notice announcing one narration link.
struct AuthenticationNotice {
  Digest block_digest{};
  identity::TokenizedUid authenticator;
  Digest narration_digest{};
  std::uint64_t ves_index = 0;

  Bytes serialize() const {
    Writer w;
    w.field(block_digest).field(authenticator.bytes).field(narration_digest).u64(ves_index);
    return std::move(w).take();
  }
};

}  // namespace flexi::consensus
