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

// Deterministic discrete-event harness. Node actors exchange messages over
// reliable in-order links with a fixed one-tick latency; a single event loop
// orders everything by (virtual time, sequence number). All key material and
// extrinsic fixtures are expanded from the scenario seed, so one config
// always produces one trace.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flexichain/bytes.hpp"
#include "flexichain/consensus.hpp"
#include "flexichain/crypto.hpp"
#include "flexichain/dag.hpp"
#include "flexichain/identity.hpp"
#include "flexichain/nodechain.hpp"
#include "flexichain/vault.hpp"

namespace flexi::netsim {

enum class AttackCategory { Sybil = 1, Phishing = 2, FiftyOnePercent = 3, BruteForce = 4 };

constexpr std::string_view to_string(AttackCategory c) noexcept {
  switch (c) {
    case AttackCategory::Sybil: return "sybil";
    case AttackCategory::Phishing: return "phishing";
    case AttackCategory::FiftyOnePercent: return "fifty-one-percent";
    case AttackCategory::BruteForce: return "brute-force";
  }
  return "?";
}

/// Secrets an adversary may hold for each of its targets. TUIDs are public
/// on NodeChain, so holding them adds nothing by itself.
enum class Secret : std::uint8_t { ConstructedKey = 1, ModuleKey = 2, VaultAccess = 4, Tuid = 8 };

class SecretSet {
 public:
  constexpr SecretSet() = default;
  constexpr SecretSet(std::initializer_list<Secret> s) {
    for (auto x : s) bits_ |= static_cast<std::uint8_t>(x);
  }
  constexpr bool has(Secret s) const noexcept { return (bits_ & static_cast<std::uint8_t>(s)) != 0; }
  constexpr void add(Secret s) noexcept { bits_ |= static_cast<std::uint8_t>(s); }
  constexpr std::uint8_t bits() const noexcept { return bits_; }

  std::string describe() const {
    std::string out;
    auto add_name = [&](Secret s, const char* name) {
      if (!has(s)) return;
      if (!out.empty()) out += '+';
      out += name;
    };
    add_name(Secret::ConstructedKey, "constructed_key");
    add_name(Secret::ModuleKey, "module_key");
    add_name(Secret::VaultAccess, "vault_access");
    add_name(Secret::Tuid, "tuid");
    return out.empty() ? "none" : out;
  }

 private:
  std::uint8_t bits_ = 0;
};

/// Protocol check that stopped an attack; None when it succeeded.
enum class ProtocolStage { None, Signature, ModuleRegistry, NnsGate, MatchLayer, OfflineGate, FinalityQuorum };

constexpr std::string_view to_string(ProtocolStage s) noexcept {
  switch (s) {
    case ProtocolStage::None: return "none";
    case ProtocolStage::Signature: return "signature";
    case ProtocolStage::ModuleRegistry: return "module_registry";
    case ProtocolStage::NnsGate: return "nns_gate";
    case ProtocolStage::MatchLayer: return "match_layer";
    case ProtocolStage::OfflineGate: return "offline_gate";
    case ProtocolStage::FinalityQuorum: return "finality_quorum";
  }
  return "?";
}

inline ProtocolStage stage_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::StaleState: return ProtocolStage::NnsGate;
    case ErrorCode::IdentityMismatch: return ProtocolStage::MatchLayer;
    case ErrorCode::UnknownModule:
    case ErrorCode::ModuleConsumed: return ProtocolStage::ModuleRegistry;
    case ErrorCode::OfflineViolation: return ProtocolStage::OfflineGate;
    default: return ProtocolStage::Signature;
  }
}

struct AttackEvent {
  AttackCategory category = AttackCategory::Sybil;
  std::vector<std::string> targets;
  SecretSet secrets;
  std::string label;
};

struct AttackOutcome {
  AttackCategory category = AttackCategory::Sybil;
  std::string label;
  bool succeeded = false;
  ProtocolStage blocked_at = ProtocolStage::None;
  std::optional<Digest> block;
  std::string detail;
};

struct NodeSpec {
  std::string name;
  NodeRole role = NodeRole::EdgeNode;
  std::string module_id;
  std::string edge;  // Subscriber/CPS: the edge node that carries its traffic
};

enum class EventKind { Join, RegisterBranch, Transaction, Seal, Attack, Disable, Enable, Sync, ReportParams, VaultQuery };

constexpr std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Join: return "join";
    case EventKind::RegisterBranch: return "register_branch";
    case EventKind::Transaction: return "transaction";
    case EventKind::Seal: return "seal";
    case EventKind::Attack: return "attack";
    case EventKind::Disable: return "disable";
    case EventKind::Enable: return "enable";
    case EventKind::Sync: return "sync";
    case EventKind::ReportParams: return "report_params";
    case EventKind::VaultQuery: return "vault_query";
  }
  return "?";
}

struct ScriptEvent {
  std::uint64_t at = 0;
  EventKind kind = EventKind::Join;
  std::string node;    // acting node
  std::string target;  // VaultQuery: node whose vault is queried
  std::string branch;
  Bytes payload;
  bool mutate_mac = false;  // ReportParams
  AttackEvent attack;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  consensus::FinalityMode finality = consensus::FinalityMode::Narrated;
  std::size_t narrated_latest = 1;
  identity::KdfParameters kdf;
  Bytes token_salt;
  std::vector<std::string> modules;  // genesis trusted-module registry
  std::vector<NodeSpec> nodes;
  std::vector<ScriptEvent> script;

  const NodeSpec* find_node(const std::string& name) const {
    for (const auto& n : nodes) {
      if (n.name == name) return &n;
    }
    return nullptr;
  }

  /// Structural checks; throws ConfigError naming the offending key.
  void validate() const {
    try {
      kdf.validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, std::string("kdf: ") + e.what());
    }
    std::size_t backups = 0;
    std::set<std::string> names;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      const std::string key = "nodes[" + std::to_string(i) + "]";
      if (n.name.empty()) fail(ErrorCode::ConfigError, key + ".name: empty");
      if (!names.insert(n.name).second) fail(ErrorCode::ConfigError, key + ".name: duplicate '" + n.name + "'");
      if (n.module_id.empty()) fail(ErrorCode::ConfigError, key + ".module: empty");
      if (n.role == NodeRole::BackupNode) ++backups;
    }
    if (backups != 1) fail(ErrorCode::ConfigError, "nodes: exactly one backup node required");
    if (nodes.empty() || nodes.front().role != NodeRole::BackupNode) {
      fail(ErrorCode::ConfigError, "nodes[0].role: the first node must be the backup node");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (n.edge.empty()) continue;
      const auto* e = find_node(n.edge);
      if (e == nullptr || e->role != NodeRole::EdgeNode) {
        fail(ErrorCode::ConfigError, "nodes[" + std::to_string(i) + "].edge: '" + n.edge + "' is not an edge node");
      }
    }
    std::uint64_t last = 0;
    for (std::size_t i = 0; i < script.size(); ++i) {
      const auto& ev = script[i];
      const std::string key = "script[" + std::to_string(i) + "]";
      if (ev.at == 0) fail(ErrorCode::ConfigError, key + ".at: time 0 is reserved for genesis");
      if (ev.at < last) fail(ErrorCode::ConfigError, key + ".at: events must be in time order");
      last = ev.at;
      auto need_node = [&](const std::string& name, const char* field) {
        if (find_node(name) == nullptr) fail(ErrorCode::ConfigError, key + "." + field + ": unknown node '" + name + "'");
      };
      switch (ev.kind) {
        case EventKind::RegisterBranch:
          if (ev.branch.empty()) fail(ErrorCode::ConfigError, key + ".branch: empty");
          break;
        case EventKind::Transaction:
        case EventKind::Seal:
          need_node(ev.node, "node");
          if (ev.branch.empty()) fail(ErrorCode::ConfigError, key + ".branch: empty");
          break;
        case EventKind::VaultQuery:
          need_node(ev.node, "node");
          need_node(ev.target, "target");
          break;
        case EventKind::Attack:
          for (const auto& t : ev.attack.targets) need_node(t, "targets");
          break;
        default:
          need_node(ev.node, "node");
      }
    }
  }
};

/// One line of the trace: time, actor, event, payload digest.
struct TraceRecord {
  std::uint64_t time = 0;
  std::string actor;
  std::string event;
  Digest payload_digest{};

  std::string line() const {
    return std::to_string(time) + ' ' + actor + ' ' + event + ' ' + to_hex(payload_digest);
  }
};

struct Metrics {
  std::uint64_t enrollments = 0;  // includes the genesis enrollment
  std::uint64_t enrollments_rejected = 0;
  std::uint64_t transactions = 0;
  std::uint64_t data_blocks = 0;
  std::uint64_t blocks_rejected = 0;
  std::uint64_t authentications = 0;
  std::uint64_t duplicate_authentications = 0;
  std::uint64_t authentication_rejections = 0;
  std::uint64_t finalized_blocks = 0;
  std::uint64_t header_alerts = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t vault_local_reads = 0;
  std::uint64_t vault_remote_blocked = 0;
  std::uint64_t vault_remote_reads = 0;  // offline-gate audit: must be zero
  std::uint64_t attacks = 0;
  std::uint64_t attack_successes = 0;
  std::uint64_t fraudulent_finalized = 0;
  std::vector<AttackOutcome> attack_outcomes;
};

/// Deterministic 32-byte expansion of (purpose, seed, name).
inline Digest derive_material(std::uint64_t seed, std::string_view purpose, std::string_view name) {
  Writer w;
  w.field(purpose).u64(seed).field(name);
  return crypto::sha256(w.bytes());
}

/// Synthetic extrinsic parameters for a node; stands in for real hardware
/// readouts.
inline identity::ExtrinsicParameters synthetic_fixture(std::uint64_t seed, std::string_view name,
                                                       const crypto::PublicKey& constructed) {
  identity::ExtrinsicParameters p;
  const auto mac = derive_material(seed, "mac", name);
  p.mac_address.assign(mac.begin(), mac.begin() + identity::kMacLength);
  p.firmware_digest = derive_material(seed, "firmware", name);
  const auto puf = derive_material(seed, "sram-puf", name);
  p.puf_signature.assign(puf.begin(), puf.end());
  p.process_power_class = derive_material(seed, "power", name)[0] % 4;
  p.location_tag = to_bytes("site/" + std::string(name));
  const auto ip = derive_material(seed, "ip", name);
  p.ip_address = {10, ip[0], ip[1], static_cast<std::uint8_t>(ip[2] | 1)};
  p.constructed_public_id.assign(constructed.begin(), constructed.end());
  return p;
}

struct SimNode {
  NodeSpec spec;
  crypto::KeyPair constructed;
  identity::TrustedModuleCredential module;
  identity::ExtrinsicParameters params;
  consensus::FullNodeState state;  // vault populated only on full nodes
  consensus::Nonce nonce{};
  bool active = true;
  bool enrolled = false;
  std::optional<identity::Uid> hardware_uid;
  identity::TokenizedUid tuid;

  bool full() const { return is_full_node(spec.role); }
};

enum class MessageKind { EnrollRequest, EnrollResponse, Transaction, BlockAnnounce, VaultQuery, ParamsReport };

constexpr std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::EnrollRequest: return "enroll-request";
    case MessageKind::EnrollResponse: return "enroll-response";
    case MessageKind::Transaction: return "transaction";
    case MessageKind::BlockAnnounce: return "block-announce";
    case MessageKind::VaultQuery: return "vault-query";
    case MessageKind::ParamsReport: return "params-report";
  }
  return "?";
}

struct Message {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t origin = 0;  // node on whose behalf the message travels
  MessageKind kind = MessageKind::EnrollRequest;
  Bytes payload;           // canonical encoding; hashed into the trace
  std::variant<std::monostate, consensus::EnrollmentRequest, consensus::EnrollmentResponse, dag::Transaction, Digest,
               identity::TokenizedUid, identity::ExtrinsicParameters>
      body;
};

class Simulation {
 public:
  static constexpr std::uint64_t kLatency = 1;

  explicit Simulation(ScenarioConfig config) : config_(std::move(config)) {
    config_.validate();
    secrets_ = {config_.kdf, config_.token_salt};
    for (const auto& id : config_.modules) {
      if (!registry_.contains(id)) registry_.add(id, module_credential(id).public_key);
    }
    for (const auto& spec : config_.nodes) {
      SimNode n;
      n.spec = spec;
      n.constructed = crypto::keypair_from_seed(derive_material(config_.seed, "constructed", spec.name));
      n.module = module_credential(spec.module_id);
      n.params = synthetic_fixture(config_.seed, spec.name, n.constructed.public_key);
      const auto nonce = derive_material(config_.seed, "nonce", spec.name);
      std::copy(nonce.begin(), nonce.begin() + 8, n.nonce.begin());
      n.state.role = spec.role;
      n.state.vault = vault::Vault(config_.token_salt);
      n.state.registry = registry_;
      nodes_.push_back(std::move(n));
    }
    bootstrap();
    for (std::size_t i = 0; i < config_.script.size(); ++i) schedule(config_.script[i].at, i);
  }

  /// Processes every queued event and message.
  void run() {
    while (!queue_.empty()) step();
    finish_metrics();
  }

  /// Processes queued items with time <= t.
  void run_until(std::uint64_t t) {
    while (!queue_.empty() && queue_.begin()->first.first <= t) step();
    finish_metrics();
  }

  AttackOutcome inject_attack(const AttackEvent& ev);

  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
  const Metrics& metrics() const noexcept { return metrics_; }
  const dag::Layer0Ledger& dag() const noexcept { return dag_; }
  const ScenarioConfig& config() const noexcept { return config_; }
  const std::vector<SimNode>& nodes() const noexcept { return nodes_; }
  std::uint64_t now() const noexcept { return now_; }

  std::string trace_text() const {
    std::string out;
    for (const auto& r : trace_) out += r.line() + '\n';
    return out;
  }

  Digest trace_digest() const { return crypto::sha256(as_view(trace_text())); }

  const SimNode& node(const std::string& name) const { return nodes_[index_of(name)]; }

  /// The NodeChain as seen by the current responder (the network view).
  const nodechain::NodeChainLedger& network_chain() const { return nodes_[canonical_holder()].state.chain; }

  const vault::Vault& network_vault() const { return nodes_[canonical_holder()].state.vault; }

  /// Finality of a block against the current network roster.
  bool is_final(const dag::DataBlock& block) const {
    return consensus::check_finality(block, network_chain().roster(), config_.finality, config_.narrated_latest);
  }

 private:
  using QueueKey = std::pair<std::uint64_t, std::uint64_t>;
  using QueueItem = std::variant<std::size_t, Message>;

  identity::TrustedModuleCredential module_credential(const std::string& id) const {
    auto kp = crypto::keypair_from_seed(derive_material(config_.seed, "trusted-module", id));
    return {id, kp.public_key, kp.secret_key};
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].spec.name == name) return i;
    }
    fail(ErrorCode::UnknownNode, "no node named '" + name + "'");
  }

  void schedule(std::uint64_t at, QueueItem item) { queue_.emplace(QueueKey{at, seq_++}, std::move(item)); }

  void record(const std::string& actor, const std::string& event, ByteView payload) {
    trace_.push_back({now_, actor, event, crypto::sha256(payload)});
  }

  void record(const std::string& actor, const std::string& event) { record(actor, event, as_view(event)); }

  void send(std::size_t from, std::size_t to, std::size_t origin, MessageKind kind, Bytes payload,
            decltype(Message::body) body) {
    Message m{from, to, origin, kind, std::move(payload), std::move(body)};
    record(nodes_[from].spec.name, "send " + std::string(to_string(kind)) + " -> " + nodes_[to].spec.name, m.payload);
    schedule(now_ + kLatency, std::move(m));
  }

  void step() {
    auto it = queue_.begin();
    now_ = it->first.first;
    QueueItem item = std::move(it->second);
    queue_.erase(it);
    if (std::holds_alternative<std::size_t>(item)) {
      apply_script(config_.script[std::get<std::size_t>(item)]);
    } else {
      deliver(std::get<Message>(item));
    }
  }

  void bootstrap() {
    auto& bn = nodes_.front();
    auto uid = consensus::bootstrap_genesis(bn.state, bn.params, bn.module.module_id, secrets_, now_);
    bn.hardware_uid = uid;
    bn.tuid = bn.state.chain.blocks().front().tuid;
    bn.enrolled = true;
    dag_ = dag::Layer0Ledger(bn.state.chain.ves().head_digest, now_);
    ++metrics_.enrollments;
    record(bn.spec.name, "genesis", bn.state.chain.blocks().front().serialize());
    // Every node starts with the public genesis block.
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      nodes_[i].state.chain = nodechain::NodeChainLedger::from_blocks({bn.state.chain.blocks().front()});
      nodes_[i].state.registry.mark_consumed(bn.module.module_id);
    }
  }

  /// Node holding the network view: the active enrolled full node with the
  /// longest NodeChain, ties going to the lowest index (the backup node).
  std::size_t canonical_holder() const {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (!n.active || !n.enrolled || !n.full()) continue;
      if (!found || n.state.chain.size() > nodes_[best].state.chain.size()) best = i;
      found = true;
    }
    return best;
  }

  std::optional<std::size_t> responder_for(std::size_t joiner) const {
    const auto& j = nodes_[joiner];
    if (!j.spec.edge.empty()) {
      auto e = index_of(j.spec.edge);
      if (nodes_[e].active && nodes_[e].enrolled) return e;
      return std::nullopt;
    }
    auto c = canonical_holder();
    if (nodes_[c].active && nodes_[c].enrolled && nodes_[c].full()) return c;
    return std::nullopt;
  }

  /// Full node that carries traffic for `n` (itself when it is full).
  std::optional<std::size_t> gateway_for(std::size_t n) const {
    if (nodes_[n].full()) return n;
    return responder_for(n);
  }

  void apply_script(const ScriptEvent& ev) {
    switch (ev.kind) {
      case EventKind::Join: return on_join(index_of(ev.node));
      case EventKind::RegisterBranch: return on_register_branch(ev.branch);
      case EventKind::Transaction: return on_transaction(index_of(ev.node), ev.branch, ev.payload);
      case EventKind::Seal: return on_seal(index_of(ev.node), ev.branch);
      case EventKind::Attack: inject_attack(ev.attack); return;
      case EventKind::Disable:
        nodes_[index_of(ev.node)].active = false;
        record(ev.node, "disabled");
        return;
      case EventKind::Enable:
        nodes_[index_of(ev.node)].active = true;
        record(ev.node, "enabled");
        return;
      case EventKind::Sync: return on_sync(index_of(ev.node));
      case EventKind::ReportParams: return on_report_params(index_of(ev.node), ev.mutate_mac);
      case EventKind::VaultQuery: return on_vault_query(index_of(ev.node), index_of(ev.target));
    }
  }

  void on_join(std::size_t j) {
    auto& n = nodes_[j];
    if (n.enrolled) {
      record(n.spec.name, "join-skipped already-enrolled");
      return;
    }
    consensus::EnrollmentRequest req;
    try {
      req = consensus::enroll_request(n.params, n.module, n.state.registry, n.nonce);
    } catch (const Error& e) {
      ++metrics_.enrollments_rejected;
      record(n.spec.name, "join-rejected " + std::string(to_string(e.code())));
      return;
    }
    auto r = responder_for(j);
    if (!r) {
      ++metrics_.enrollments_rejected;
      record(n.spec.name, "join-rejected no-responder");
      return;
    }
    auto payload = req.serialize();
    send(j, *r, j, MessageKind::EnrollRequest, std::move(payload), req);
  }

  void on_register_branch(const std::string& branch) {
    if (dag_.registry().find(branch)) {
      record("network", "register-branch-rejected " + branch);
      return;
    }
    Writer w;
    w.field("branch-genesis").field(branch).field(network_chain().blocks().front().header_digest);
    const auto genesis = crypto::sha256(w.bytes());
    auto tag = dag_.register_branch(branch, genesis, now_);
    record("network", "register-branch " + branch + " tag=" + tag.name(), genesis);
  }

  dag::BlockTypeTag tag_for(const std::string& branch) const {
    auto tag = dag_.registry().find(branch);
    if (!tag) fail(ErrorCode::UnknownBranch, "branch '" + branch + "' is not registered");
    return *tag;
  }

  void on_transaction(std::size_t s, const std::string& branch, const Bytes& payload) {
    auto& n = nodes_[s];
    if (!n.enrolled || !n.active) {
      record(n.spec.name, "transaction-skipped");
      return;
    }
    auto tag = dag_.registry().find(branch);
    if (!tag) {
      record(n.spec.name, "transaction-rejected UnknownBranch");
      return;
    }
    auto tx = dag::make_transaction(n.constructed, *tag, payload, now_);
    auto gw = gateway_for(s);
    if (!gw) {
      record(n.spec.name, "transaction-rejected no-gateway");
      return;
    }
    auto bytes = tx.serialize();
    if (*gw == s) {
      accept_transaction(s, tx);
    } else {
      send(s, *gw, s, MessageKind::Transaction, std::move(bytes), tx);
    }
  }

  void accept_transaction(std::size_t at, const dag::Transaction& tx) {
    if (!tx.verify()) {
      record(nodes_[at].spec.name, "transaction-rejected BadSignature", tx.serialize());
      return;
    }
    pool_.push_back(tx);
    ++metrics_.transactions;
    record(nodes_[at].spec.name, "transaction-pooled", tx.serialize());
  }

  consensus::Authenticator honest_authenticator(const SimNode& n) const {
    return {n.tuid, *n.hardware_uid, n.module, n.state.chain.ves().index};
  }

  /// Runs authenticate_block for `n` against the canonical block.
  std::optional<ErrorCode> authenticate_as(const SimNode& n, const consensus::Authenticator& auth,
                                           const Digest& block_digest, const vault::Vault* local_vault) {
    auto& block = dag_.narration_target(block_digest);
    consensus::AuthContext ctx{network_chain().ves(), n.state.registry, n.state.chain, local_vault,
                               config_.token_salt};
    try {
      auto r = consensus::authenticate_block(auth, block, ctx);
      if (r == consensus::AuthResult::Duplicate) {
        ++metrics_.duplicate_authentications;
        record(n.spec.name, "authenticate-duplicate", block_digest);
      } else {
        ++metrics_.authentications;
        consensus::AuthenticationNotice notice{block_digest, auth.tuid, block.narration_head(),
                                               auth.local_ves_index};
        record(n.spec.name, "authenticate", notice.serialize());
      }
      return std::nullopt;
    } catch (const Error& e) {
      ++metrics_.authentication_rejections;
      record(n.spec.name, "authenticate-rejected " + std::string(to_string(e.code())), block_digest);
      return e.code();
    }
  }

  void note_finality(const Digest& block_digest) {
    if (finalized_.count(block_digest) != 0) return;
    if (!is_final(dag_.at(block_digest))) return;
    finalized_.insert(block_digest);
    ++metrics_.finalized_blocks;
    if (fraudulent_.count(block_digest) != 0) ++metrics_.fraudulent_finalized;
    record("network", "final", block_digest);
  }

  void on_seal(std::size_t s, const std::string& branch) {
    auto& n = nodes_[s];
    if (!n.enrolled || !n.active) {
      record(n.spec.name, "seal-skipped");
      return;
    }
    dag::DataBlock block;
    try {
      auto candidate = dag::build_candidate_block(pool_, n.constructed.public_key, tag_for(branch), {0, now_});
      block = dag_.seal(std::move(candidate));
    } catch (const Error& e) {
      ++metrics_.blocks_rejected;
      record(n.spec.name, "seal-rejected " + std::string(to_string(e.code())));
      return;
    }
    // The creator is the first authenticator of its own block.
    dag::DataBlock probe = block;
    consensus::AuthContext ctx{network_chain().ves(), n.state.registry, n.state.chain,
                               n.full() ? &n.state.vault : nullptr, config_.token_salt};
    try {
      consensus::authenticate_block(honest_authenticator(n), probe, ctx);
    } catch (const Error& e) {
      ++metrics_.blocks_rejected;
      record(n.spec.name, "seal-rejected " + std::string(to_string(e.code())), block.serialize());
      return;
    }
    dag_.append(block);
    ++metrics_.data_blocks;
    std::set<Digest> included;
    for (const auto& tx : block.transactions) included.insert(tx.digest());
    std::erase_if(pool_, [&](const dag::Transaction& tx) { return included.count(tx.digest()) != 0; });
    record(n.spec.name, "seal " + branch, block.serialize());
    authenticate_as(n, honest_authenticator(n), block.header_digest, n.full() ? &n.state.vault : nullptr);
    note_finality(block.header_digest);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (i == s || !nodes_[i].enrolled) continue;
      send(s, i, s, MessageKind::BlockAnnounce, block.serialize(), block.header_digest);
    }
  }

  void on_sync(std::size_t s) {
    auto& n = nodes_[s];
    const auto& source = nodes_[canonical_holder()];
    if (!n.active || !n.enrolled || &source == &n) {
      record(n.spec.name, "sync-skipped");
      return;
    }
    std::uint64_t pulled = 0;
    for (auto i = n.state.chain.ves().index; i < source.state.chain.size(); ++i) {
      const auto& block = source.state.chain.blocks()[i];
      n.state.chain.append(block);
      if (n.full()) n.state.vault.append(source.state.vault.entries()[i], n.spec.role);
      ++pulled;
    }
    for (const auto& e : source.state.vault.entries()) n.state.registry.mark_consumed(e.module_id);
    Writer w;
    w.u64(n.state.chain.ves().index).field(n.state.chain.ves().head_digest);
    record(n.spec.name, "sync pulled=" + std::to_string(pulled), w.bytes());
  }

  void on_report_params(std::size_t s, bool mutate_mac) {
    auto& n = nodes_[s];
    auto params = n.params;
    if (mutate_mac) params.mac_address[0] ^= 0x01;
    auto gw = responder_for(s);
    if (!n.enrolled || !gw) {
      record(n.spec.name, "report-skipped");
      return;
    }
    send(s, *gw, s, MessageKind::ParamsReport, params.serialize(), params);
  }

  void on_vault_query(std::size_t from, std::size_t target) {
    send(from, target, from, MessageKind::VaultQuery, Bytes(nodes_[from].tuid.bytes.begin(), nodes_[from].tuid.bytes.end()),
         nodes_[from].tuid);
  }

  void deliver(const Message& m) {
    auto& to = nodes_[m.to];
    if (!to.active) {
      ++metrics_.messages_dropped;
      record(to.spec.name, "drop " + std::string(to_string(m.kind)), m.payload);
      return;
    }
    ++metrics_.messages_delivered;
    switch (m.kind) {
      case MessageKind::EnrollRequest: return handle_enroll_request(m);
      case MessageKind::EnrollResponse: return handle_enroll_response(m);
      case MessageKind::Transaction: return accept_transaction(m.to, std::get<dag::Transaction>(m.body));
      case MessageKind::BlockAnnounce: return handle_block_announce(m);
      case MessageKind::VaultQuery: return handle_vault_query(m);
      case MessageKind::ParamsReport: return handle_params_report(m);
    }
  }

  void handle_enroll_request(const Message& m) {
    auto& responder = nodes_[m.to];
    const auto& req = std::get<consensus::EnrollmentRequest>(m.body);
    consensus::EnrollmentOutcome out;
    try {
      // The previous UID is read by the responder's own UID generator; it
      // never leaves the responder, so this is a local access.
      out = consensus::enroll_respond(responder.state, req, secrets_, now_);
    } catch (const Error& e) {
      ++metrics_.enrollments_rejected;
      record(responder.spec.name, "enroll-rejected " + std::string(to_string(e.code())), m.payload);
      return;
    }
    ++metrics_.enrollments;
    channel_[out.entry.enrollment_index] = out.entry;
    auto payload = out.response.serialize();
    record(responder.spec.name, "enroll-respond index=" + std::to_string(out.response.enrollment_index), payload);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (i == m.to) continue;
      if (!nodes_[i].enrolled && i != m.origin) continue;
      send(m.to, i, m.origin, MessageKind::EnrollResponse, payload, out.response);
    }
  }

  void handle_enroll_response(const Message& m) {
    auto& n = nodes_[m.to];
    const auto& resp = std::get<consensus::EnrollmentResponse>(m.body);
    const auto& entry = channel_.at(resp.enrollment_index);
    if (m.to == m.origin && !n.enrolled) {
      // The joiner copies the responder's ledger (and vault, for full nodes)
      // up to its own block; its module receives the UID over the local
      // trusted channel.
      const auto& src = nodes_[m.from].state;
      std::vector<nodechain::VirtualExistenceBlock> prefix(src.chain.blocks().begin(),
                                                           src.chain.blocks().begin() + static_cast<std::ptrdiff_t>(resp.enrollment_index));
      n.state.chain = nodechain::NodeChainLedger::from_blocks(std::move(prefix));
      if (n.full()) {
        n.state.vault = vault::Vault(config_.token_salt);
        for (std::uint64_t i = 0; i < resp.enrollment_index; ++i) n.state.vault.append(src.vault.entries()[i], n.spec.role);
      }
      for (std::uint64_t i = 1; i <= resp.enrollment_index; ++i) {
        n.state.registry.mark_consumed(i == 1 ? nodes_.front().module.module_id : channel_.at(i).module_id);
      }
      n.hardware_uid = entry.real_uid;
      n.tuid = entry.tuid;
      n.enrolled = true;
      record(n.spec.name, "enrolled index=" + std::to_string(resp.enrollment_index), m.payload);
      return;
    }
    try {
      if (n.full()) {
        consensus::apply_enrollment(n.state, resp, entry);
      } else {
        n.state.chain.append(resp.virtual_block);
        n.state.registry.mark_consumed(entry.module_id);
      }
      record(n.spec.name, "ves index=" + std::to_string(n.state.chain.ves().index), m.payload);
    } catch (const Error& e) {
      record(n.spec.name, "ves-lag " + std::string(to_string(e.code())), m.payload);
    }
  }

  void handle_block_announce(const Message& m) {
    auto& n = nodes_[m.to];
    const auto& digest = std::get<Digest>(m.body);
    if (!n.enrolled || !n.hardware_uid) return;
    authenticate_as(n, honest_authenticator(n), digest, n.full() ? &n.state.vault : nullptr);
    note_finality(digest);
  }

  void handle_vault_query(const Message& m) {
    auto& n = nodes_[m.to];
    if (!n.full()) {
      record(n.spec.name, "vault-query-ignored no-vault", m.payload);
      return;
    }
    try {
      n.state.vault.lookup(std::get<identity::TokenizedUid>(m.body), vault::AccessContext::Remote);
      ++metrics_.vault_remote_reads;
      record(n.spec.name, "vault-query-served", m.payload);
    } catch (const Error& e) {
      ++metrics_.vault_remote_blocked;
      record(n.spec.name, "vault-query-blocked " + std::string(to_string(e.code())), m.payload);
    }
  }

  void handle_params_report(const Message& m) {
    auto& n = nodes_[m.to];
    const auto& params = std::get<identity::ExtrinsicParameters>(m.body);
    auto idx = n.state.chain.index_of(nodes_[m.origin].tuid);
    if (!idx) {
      record(n.spec.name, "header-check-skipped UnknownNode", m.payload);
      return;
    }
    auto alert = nodechain::detect_header_change(n.state.chain, *idx, params);
    if (alert) {
      ++metrics_.header_alerts;
      record(n.spec.name, "header-alert " + nodes_[m.origin].spec.name + " index=" + std::to_string(alert->index),
             alert->changed_digest);
    } else {
      record(n.spec.name, "header-unchanged " + nodes_[m.origin].spec.name, m.payload);
    }
  }

  void finish_metrics() {
    metrics_.vault_local_reads = 0;
    for (const auto& n : nodes_) metrics_.vault_local_reads += n.state.vault.audit().local_reads;
    metrics_.vault_remote_blocked = 0;
    for (const auto& n : nodes_) metrics_.vault_remote_blocked += n.state.vault.audit().remote_attempts_blocked;
  }

  // --- adversary -----------------------------------------------------------

  struct Impersonation {
    consensus::Authenticator auth;
    const SimNode* target = nullptr;
    std::optional<vault::Vault> stolen_vault;
  };

  crypto::KeyPair adversary_key(const std::string& label) const {
    return crypto::keypair_from_seed(derive_material(config_.seed, "adversary", label));
  }

  /// Assembles what the adversary can present when acting as `target`.
  /// Returns the blocking stage if it cannot even assemble an identity.
  std::variant<Impersonation, ProtocolStage> impersonate(const SimNode& target, const AttackEvent& ev) {
    Impersonation imp;
    imp.target = &target;
    imp.auth.tuid = target.tuid;
    imp.auth.local_ves_index = target.state.chain.ves().index;
    if (ev.secrets.has(Secret::ModuleKey)) {
      imp.auth.module = target.module;
    } else {
      const auto kp = adversary_key(ev.label + "/module");
      imp.auth.module = {target.module.module_id, kp.public_key, kp.secret_key};
    }
    if (ev.secrets.has(Secret::VaultAccess)) {
      imp.stolen_vault = network_vault();
      auto entry = imp.stolen_vault->lookup(target.tuid, vault::AccessContext::Local);
      imp.auth.hardware_uid = entry ? entry->real_uid : identity::Uid::zero(config_.kdf.output_length);
    } else if (ev.category == AttackCategory::BruteForce) {
      // Without the vault, the adversary asks a full node for the UID.
      const auto holder = canonical_holder();
      record("adversary", "remote-vault-read -> " + nodes_[holder].spec.name, target.tuid.bytes);
      try {
        nodes_[holder].state.vault.lookup(target.tuid, vault::AccessContext::Remote);
        ++metrics_.vault_remote_reads;
      } catch (const Error&) {
        ++metrics_.vault_remote_blocked;
        return ProtocolStage::OfflineGate;
      }
    } else {
      Bytes guess;
      for (std::size_t i = 0; guess.size() < config_.kdf.output_length; ++i) {
        auto d = derive_material(config_.seed, "uid-guess", ev.label + "/" + std::to_string(i));
        guess.insert(guess.end(), d.begin(), d.end());
      }
      guess.resize(config_.kdf.output_length);
      imp.auth.hardware_uid = identity::Uid(std::move(guess));
    }
    return imp;
  }

  /// Creates a fraudulent block in the name of `imp.target`. Returns its
  /// digest or the blocking stage.
  std::variant<Digest, ProtocolStage> forge_block(const Impersonation& imp, const AttackEvent& ev,
                                                  std::string& detail) {
    const auto& target = *imp.target;
    if (dag_.registry().size() < 2) on_register_branch("adversary-target");
    const auto tag = dag_.registry().branches().rbegin()->first;
    dag::Transaction tx;
    if (ev.secrets.has(Secret::ConstructedKey)) {
      tx = dag::make_transaction(target.constructed, tag, to_bytes("forged:" + ev.label), now_);
    } else {
      tx = dag::make_transaction(adversary_key(ev.label), tag, to_bytes("forged:" + ev.label), now_);
      tx.sender = target.constructed.public_key;
    }
    dag::DataBlock block;
    try {
      block = dag_.seal(dag::build_candidate_block({tx}, target.constructed.public_key, tag, {now_, now_}));
      dag::DataBlock probe = block;
      consensus::AuthContext ctx{network_chain().ves(), target.state.registry, target.state.chain,
                                 imp.stolen_vault ? &*imp.stolen_vault : nullptr, config_.token_salt};
      consensus::authenticate_block(imp.auth, probe, ctx);
    } catch (const Error& e) {
      detail = "creator " + target.spec.name + ": " + e.what();
      return stage_for(e.code());
    }
    dag_.append(block);
    fraudulent_.insert(block.header_digest);
    record("adversary", "forged-block as " + target.spec.name, block.serialize());
    authenticate_as(target, imp.auth, block.header_digest, imp.stolen_vault ? &*imp.stolen_vault : nullptr);
    return block.header_digest;
  }

  /// Drives a block forged as the first target to finality, endorsed either
  /// by the remaining targets (collusion) or by every honest node.
  AttackOutcome impersonation_route(const AttackEvent& ev, bool honest_endorse) {
    AttackOutcome out{ev.category, ev.label, false, ProtocolStage::None, std::nullopt, {}};
    if (ev.targets.empty()) {
      out.blocked_at = ProtocolStage::MatchLayer;
      out.detail = "no identity to act as";
      return out;
    }
    std::vector<Impersonation> controlled;
    for (const auto& name : ev.targets) {
      auto r = impersonate(node(name), ev);
      if (std::holds_alternative<ProtocolStage>(r)) {
        if (controlled.empty() && name == ev.targets.front()) {
          out.blocked_at = std::get<ProtocolStage>(r);
          out.detail = "cannot assemble identity of " + name;
          return out;
        }
        continue;
      }
      controlled.push_back(std::move(std::get<Impersonation>(r)));
    }
    auto forged = forge_block(controlled.front(), ev, out.detail);
    if (std::holds_alternative<ProtocolStage>(forged)) {
      out.blocked_at = std::get<ProtocolStage>(forged);
      return out;
    }
    const auto digest = std::get<Digest>(forged);
    out.block = digest;
    if (honest_endorse) {
      for (const auto& n : nodes_) {
        if (&n == controlled.front().target || !n.enrolled || !n.active || !n.hardware_uid) continue;
        authenticate_as(n, honest_authenticator(n), digest, n.full() ? &n.state.vault : nullptr);
      }
    } else {
      for (std::size_t i = 1; i < controlled.size(); ++i) {
        const auto& imp = controlled[i];
        authenticate_as(*imp.target, imp.auth, digest, imp.stolen_vault ? &*imp.stolen_vault : nullptr);
      }
    }
    note_finality(digest);
    if (finalized_.count(digest) != 0) {
      out.succeeded = true;
    } else {
      out.blocked_at = ProtocolStage::FinalityQuorum;
      if (out.detail.empty()) out.detail = "narration does not satisfy " + std::string(to_string(config_.finality));
    }
    return out;
  }

  /// Attempts to enroll a fabricated identity. Returns the blocking stage,
  /// or the enrolled sybil's authenticator on success.
  std::variant<consensus::Authenticator, ProtocolStage> sybil_enroll(const AttackEvent& ev, std::string& detail) {
    const auto sybil_key = adversary_key(ev.label + "/sybil");
    auto params = synthetic_fixture(config_.seed ^ 0x5b11u, "sybil/" + ev.label, sybil_key.public_key);
    identity::TrustedModuleCredential cred;
    if (ev.secrets.has(Secret::ModuleKey) && !ev.targets.empty()) {
      cred = node(ev.targets.front()).module;
    } else {
      const auto kp = adversary_key(ev.label + "/rogue-module");
      cred = {"rogue/" + ev.label, kp.public_key, kp.secret_key};
    }
    auto containers = identity::hash_extrinsic(params);
    consensus::EnrollmentRequest req{containers.container1, containers.container2, cred.module_id, {}, {}};
    req.module_signature = crypto::sign(cred.private_key, req.signed_bytes());
    const auto r = canonical_holder();
    auto& responder = nodes_[r];
    record("adversary", "sybil-enroll -> " + responder.spec.name, req.serialize());
    try {
      auto out = consensus::enroll_respond(responder.state, req, secrets_, now_);
      ++metrics_.enrollments;
      channel_[out.entry.enrollment_index] = out.entry;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i == r || !nodes_[i].enrolled || !nodes_[i].active) continue;
        if (nodes_[i].full()) {
          consensus::apply_enrollment(nodes_[i].state, out.response, out.entry);
        } else {
          nodes_[i].state.chain.append(out.response.virtual_block);
        }
      }
      return consensus::Authenticator{out.entry.tuid, out.entry.real_uid, cred, responder.state.chain.ves().index};
    } catch (const Error& e) {
      ++metrics_.enrollments_rejected;
      detail = std::string("sybil enrollment: ") + e.what();
      return stage_for(e.code());
    }
  }

  AttackOutcome run_sybil(const AttackEvent& ev) {
    std::string detail;
    auto enrolled = sybil_enroll(ev, detail);
    if (std::holds_alternative<consensus::Authenticator>(enrolled)) {
      // A sybil that got in forges and endorses alone.
      AttackOutcome out{ev.category, ev.label, false, ProtocolStage::None, std::nullopt, "sybil enrolled"};
      const auto& auth = std::get<consensus::Authenticator>(enrolled);
      const auto& responder = nodes_[canonical_holder()];
      if (dag_.registry().size() < 2) on_register_branch("adversary-target");
      const auto tag = dag_.registry().branches().rbegin()->first;
      const auto key = adversary_key(ev.label + "/sybil");
      auto tx = dag::make_transaction(key, tag, to_bytes("sybil:" + ev.label), now_);
      auto block = dag_.seal(dag::build_candidate_block({tx}, key.public_key, tag, {now_, now_}));
      dag_.append(block);
      fraudulent_.insert(block.header_digest);
      authenticate_as(responder, auth, block.header_digest, nullptr);
      note_finality(block.header_digest);
      out.block = block.header_digest;
      out.succeeded = finalized_.count(block.header_digest) != 0;
      if (!out.succeeded) out.blocked_at = ProtocolStage::FinalityQuorum;
      return out;
    }
    const auto stage = std::get<ProtocolStage>(enrolled);
    // A consumed module key alone cannot mint identities; with stolen
    // credentials the adversary falls back to controlling its targets.
    if (ev.secrets.has(Secret::ModuleKey) && ev.secrets.has(Secret::ConstructedKey) && !ev.targets.empty()) {
      auto out = impersonation_route(ev, false);
      out.detail = detail + "; " + out.detail;
      return out;
    }
    return {ev.category, ev.label, false, stage, std::nullopt, detail};
  }

  ScenarioConfig config_;
  consensus::NetworkSecrets secrets_;
  identity::TrustedModuleRegistry registry_;
  std::vector<SimNode> nodes_;
  dag::Layer0Ledger dag_;
  std::vector<dag::Transaction> pool_;
  std::map<std::uint64_t, vault::VaultEntry> channel_;  // local trusted-module channel
  std::map<QueueKey, QueueItem> queue_;
  std::set<Digest> finalized_;
  std::set<Digest> fraudulent_;
  std::vector<TraceRecord> trace_;
  Metrics metrics_;
  std::uint64_t now_ = 0;
  std::uint64_t seq_ = 0;
};

/// Runs one adversary action at the current virtual time using exactly the
/// secrets in `ev` and records the first protocol check that stopped it.
inline AttackOutcome Simulation::inject_attack(const AttackEvent& ev) {
  for (const auto& t : ev.targets) {
    if (!node(t).enrolled) fail(ErrorCode::UnknownNode, "attack target '" + t + "' is not enrolled");
  }
  AttackOutcome out;
  switch (ev.category) {
    case AttackCategory::Sybil: out = run_sybil(ev); break;
    case AttackCategory::Phishing: out = impersonation_route(ev, true); break;
    case AttackCategory::FiftyOnePercent: out = impersonation_route(ev, false); break;
    case AttackCategory::BruteForce: out = impersonation_route(ev, true); break;
  }
  ++metrics_.attacks;
  if (out.succeeded) ++metrics_.attack_successes;
  Writer w;
  w.u64(static_cast<std::uint64_t>(ev.category)).u64(ev.secrets.bits()).field(out.detail);
  record("adversary",
         "attack " + std::string(to_string(ev.category)) + " secrets=" + ev.secrets.describe() +
             (out.succeeded ? " succeeded" : " blocked_at=" + std::string(to_string(out.blocked_at))),
         w.bytes());
  metrics_.attack_outcomes.push_back(out);
  finish_metrics();
  return out;
}

struct ScenarioResult {
  std::vector<TraceRecord> trace;
  Metrics metrics;
  Digest trace_digest{};
};

inline ScenarioResult run_scenario(const ScenarioConfig& config) {
  Simulation sim(config);
  sim.run();
  return {sim.trace(), sim.metrics(), sim.trace_digest()};
}

}  // namespace flexi::netsim
