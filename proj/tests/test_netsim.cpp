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

#include <gtest/gtest.h>

#include "flexichain/netsim.hpp"
#include "support/fixtures.hpp"

namespace {

using flexi::NodeRole;
using namespace flexi::netsim;

/// Backup node "bn", edges "en1".., subscribers "s1".. routed through en1.
ScenarioConfig network_config(int edges, int subscribers, std::uint64_t seed = 7) {
  ScenarioConfig c;
  c.seed = seed;
  c.kdf = fixtures::fast_kdf();
  c.token_salt = fixtures::token_salt();
  auto add = [&](const std::string& name, NodeRole role, const std::string& edge = {}) {
    c.modules.push_back("tm-" + name);
    c.nodes.push_back({name, role, "tm-" + name, edge});
  };
  add("bn", NodeRole::BackupNode);
  for (int i = 1; i <= edges; ++i) add("en" + std::to_string(i), NodeRole::EdgeNode);
  for (int i = 1; i <= subscribers; ++i) add("s" + std::to_string(i), NodeRole::Subscriber, edges > 0 ? "en1" : "");
  std::uint64_t t = 1;
  for (std::size_t i = 1; i < c.nodes.size(); ++i, t += 4) {
    ScriptEvent join;
    join.at = t;
    join.kind = EventKind::Join;
    join.node = c.nodes[i].name;
    c.script.push_back(join);
  }
  return c;
}

std::uint64_t last_time(const ScenarioConfig& c) { return c.script.empty() ? 0 : c.script.back().at; }

void push(ScenarioConfig& c, ScriptEvent e) {
  e.at = last_time(c) + 4;
  c.script.push_back(std::move(e));
}

ScriptEvent event(EventKind kind, std::string node = {}, std::string branch = {}) {
  ScriptEvent e;
  e.kind = kind;
  e.node = std::move(node);
  e.branch = std::move(branch);
  return e;
}

/// Registers a branch, then `creator` submits one transaction and seals it.
void add_block(ScenarioConfig& c, const std::string& creator) {
  if (std::none_of(c.script.begin(), c.script.end(), [](const ScriptEvent& e) { return e.kind == EventKind::RegisterBranch; })) {
    push(c, event(EventKind::RegisterBranch, {}, "energy"));
  }
  auto tx = event(EventKind::Transaction, creator, "energy");
  tx.payload = flexi::to_bytes("reading");
  push(c, tx);
  push(c, event(EventKind::Seal, creator, "energy"));
}

TEST(Scenario, GenesisOnly) {
  auto c = network_config(0, 0);
  Simulation sim(c);
  sim.run();
  EXPECT_EQ(sim.network_chain().size(), 1u);
  EXPECT_EQ(sim.network_vault().size(), 1u);
  EXPECT_EQ(sim.dag().data_block_count(), 0u);
  EXPECT_EQ(sim.metrics().enrollments, 1u);
}

TEST(Scenario, FourNodeJoinScript) {
  auto c = network_config(1, 2);
  Simulation sim(c);
  sim.run();
  EXPECT_EQ(sim.metrics().enrollments, 4u);
  EXPECT_EQ(sim.metrics().enrollments_rejected, 0u);
  for (const auto& n : sim.nodes()) {
    EXPECT_TRUE(n.enrolled) << n.spec.name;
    EXPECT_EQ(n.state.chain.size(), 4u) << n.spec.name;
    EXPECT_EQ(n.state.vault.size(), n.full() ? 4u : 0u) << n.spec.name;
  }
  EXPECT_FALSE(flexi::nodechain::verify_chain(sim.network_chain(),
                                              flexi::nodechain::FullVerification{sim.network_vault(), c.kdf}));
}

TEST(Scenario, ReplicationEqualityAfterEveryEnrollment) {
  auto c = network_config(3, 3);
  Simulation sim(c);
  for (const auto& ev : c.script) {
    sim.run_until(ev.at + 3);
    const auto reference = sim.node("bn").state.vault.serialize();
    for (const auto& n : sim.nodes()) {
      if (n.full() && n.enrolled) {
        EXPECT_EQ(n.state.vault.serialize(), reference) << n.spec.name << " @" << ev.at;
      }
    }
  }
}

TEST(Scenario, UnregisteredModuleJoinIsRejected) {
  auto c = network_config(1, 1);
  c.modules.pop_back();  // s1's module never reaches the genesis registry
  Simulation sim(c);
  sim.run();
  EXPECT_EQ(sim.metrics().enrollments_rejected, 1u);
  EXPECT_EQ(sim.network_chain().size(), 2u);
  EXPECT_FALSE(sim.node("s1").enrolled);
}

TEST(Scenario, DeterministicTraceDigest) {
  auto c = network_config(2, 2);
  add_block(c, "s1");
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  const auto d = run_scenario(c);
  EXPECT_EQ(a.trace_digest, b.trace_digest);
  EXPECT_EQ(a.trace_digest, d.trace_digest);
  c.seed += 1;
  EXPECT_NE(run_scenario(c).trace_digest, a.trace_digest);
}

TEST(Scenario, HonestBlockReachesFinalityInBothModes) {
  for (auto mode : {flexi::consensus::FinalityMode::Narrated, flexi::consensus::FinalityMode::Exhaustive}) {
    auto c = network_config(2, 2);
    c.finality = mode;
    add_block(c, "s2");
    Simulation sim(c);
    sim.run();
    EXPECT_EQ(sim.metrics().data_blocks, 1u);
    EXPECT_EQ(sim.metrics().finalized_blocks, 1u) << to_string(mode);
    for (const auto& b : sim.dag().blocks()) {
      if (!b.transactions.empty()) {
        EXPECT_TRUE(flexi::dag::narration_intact(b));
      }
    }
  }
}

TEST(Scenario, BackupNodeFailureDoesNotHaltNetwork) {
  auto c = network_config(1, 0);
  push(c, event(EventKind::Disable, "bn"));
  c.nodes.push_back({"en2", NodeRole::EdgeNode, "tm-en2", {}});
  c.modules.push_back("tm-en2");
  c.nodes.push_back({"s9", NodeRole::Subscriber, "tm-s9", "en1"});
  c.modules.push_back("tm-s9");
  push(c, event(EventKind::Join, "en2"));
  push(c, event(EventKind::Join, "s9"));
  add_block(c, "s9");
  Simulation sim(c);
  sim.run();
  EXPECT_FALSE(sim.node("bn").active);
  EXPECT_TRUE(sim.node("en2").enrolled);
  EXPECT_TRUE(sim.node("s9").enrolled);
  EXPECT_EQ(sim.network_chain().size(), 4u);
  EXPECT_EQ(sim.metrics().finalized_blocks, 1u);
  EXPECT_GT(sim.metrics().messages_dropped, 0u);
}

TEST(Scenario, LaggingNodeIsGatedUntilSync) {
  auto c = network_config(1, 2);
  // Take s1 offline across s2's enrollment, bring it back, then seal a block.
  auto& join_s2 = c.script.back();
  const auto t = join_s2.at;
  auto off = event(EventKind::Disable, "s1");
  off.at = t - 1;
  c.script.insert(c.script.end() - 1, off);
  push(c, event(EventKind::Enable, "s1"));
  add_block(c, "en1");
  Simulation sim(c);
  sim.run();
  EXPECT_LT(sim.node("s1").state.chain.size(), sim.network_chain().size());
  EXPECT_GT(sim.metrics().authentication_rejections, 0u);

  push(c, event(EventKind::Sync, "s1"));
  add_block(c, "s1");
  Simulation synced(c);
  synced.run();
  EXPECT_EQ(synced.node("s1").state.chain.size(), synced.network_chain().size());
  EXPECT_EQ(synced.metrics().data_blocks, 2u);
}

TEST(Scenario, HeaderChangeRaisesAlert) {
  auto c = network_config(1, 1);
  auto same = event(EventKind::ReportParams, "s1");
  push(c, same);
  auto changed = event(EventKind::ReportParams, "s1");
  changed.mutate_mac = true;
  push(c, changed);
  Simulation sim(c);
  sim.run();
  EXPECT_EQ(sim.metrics().header_alerts, 1u);
}

TEST(Scenario, RemoteVaultQueryIsBlocked) {
  auto c = network_config(1, 1);
  auto q = event(EventKind::VaultQuery, "s1");
  q.target = "bn";
  push(c, q);
  Simulation sim(c);
  sim.run();
  EXPECT_EQ(sim.metrics().vault_remote_blocked, 1u);
  EXPECT_EQ(sim.metrics().vault_remote_reads, 0u);
}

TEST(Scenario, ConfigValidation) {
  auto c = network_config(1, 1);
  c.nodes[0].role = NodeRole::EdgeNode;
  EXPECT_THROW(Simulation{c}, flexi::Error);
  c = network_config(1, 1);
  c.script[0].node = "ghost";
  try {
    Simulation sim(c);
    FAIL() << "expected ConfigError";
  } catch (const flexi::Error& e) {
    EXPECT_EQ(e.code(), flexi::ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("script[0].node"), std::string::npos);
  }
}

// --- attacks ---------------------------------------------------------------

AttackOutcome attack_after_setup(AttackEvent ev, int edges = 2, int subscribers = 3,
                                 flexi::consensus::FinalityMode mode = flexi::consensus::FinalityMode::Narrated,
                                 Metrics* metrics = nullptr) {
  auto c = network_config(edges, subscribers);
  c.finality = mode;
  push(c, event(EventKind::RegisterBranch, {}, "energy"));
  Simulation sim(c);
  sim.run();
  auto out = sim.inject_attack(ev);
  if (metrics != nullptr) *metrics = sim.metrics();
  return out;
}

std::vector<std::string> all_nodes(int edges, int subscribers) {
  std::vector<std::string> out{"bn"};
  for (int i = 1; i <= edges; ++i) out.push_back("en" + std::to_string(i));
  for (int i = 1; i <= subscribers; ++i) out.push_back("s" + std::to_string(i));
  return out;
}

const SecretSet kFull{Secret::ConstructedKey, Secret::ModuleKey, Secret::VaultAccess, Secret::Tuid};

TEST(Attack, PhishingWithConstructedKeyOnlyStopsAtMatchLayer) {
  auto out = attack_after_setup({AttackCategory::Phishing, {"s1"}, {Secret::ConstructedKey}, "p"});
  EXPECT_FALSE(out.succeeded);
  EXPECT_EQ(out.blocked_at, ProtocolStage::MatchLayer);
}

TEST(Attack, SybilWithoutModuleKeyStopsAtModuleRegistry) {
  auto out = attack_after_setup({AttackCategory::Sybil, {}, {}, "s"});
  EXPECT_FALSE(out.succeeded);
  EXPECT_EQ(out.blocked_at, ProtocolStage::ModuleRegistry);
}

TEST(Attack, SybilWithConsumedModuleKeyStopsAtModuleRegistry) {
  auto out = attack_after_setup({AttackCategory::Sybil, {"s1"}, {Secret::ModuleKey}, "s"});
  EXPECT_EQ(out.blocked_at, ProtocolStage::ModuleRegistry);
}

TEST(Attack, BruteForceWithoutVaultStopsAtOfflineGate) {
  Metrics m;
  auto out = attack_after_setup({AttackCategory::BruteForce, {"s2"}, {Secret::ConstructedKey, Secret::ModuleKey}, "b"},
                                2, 3, flexi::consensus::FinalityMode::Narrated, &m);
  EXPECT_EQ(out.blocked_at, ProtocolStage::OfflineGate);
  EXPECT_EQ(m.vault_remote_reads, 0u);
  EXPECT_GE(m.vault_remote_blocked, 1u);
}

TEST(Attack, ForgedTransactionWithoutConstructedKeyStopsAtSignature) {
  auto out = attack_after_setup({AttackCategory::Phishing, {"s1"}, {Secret::ModuleKey, Secret::VaultAccess}, "p"});
  EXPECT_EQ(out.blocked_at, ProtocolStage::Signature);
}

TEST(Attack, StolenUidWithoutModuleKeyStopsAtSignature) {
  auto out = attack_after_setup({AttackCategory::Phishing, {"s1"}, {Secret::ConstructedKey, Secret::VaultAccess}, "p"});
  EXPECT_EQ(out.blocked_at, ProtocolStage::Signature);
}

TEST(Attack, FiftyOnePercentWithFullSecretsOfAllNodesSucceeds) {
  for (auto mode : {flexi::consensus::FinalityMode::Narrated, flexi::consensus::FinalityMode::Exhaustive}) {
    Metrics m;
    auto out = attack_after_setup({AttackCategory::FiftyOnePercent, all_nodes(2, 3), kFull, "total"}, 2, 3, mode, &m);
    EXPECT_TRUE(out.succeeded) << to_string(out.blocked_at) << " " << out.detail;
    EXPECT_EQ(m.fraudulent_finalized, 1u);
  }
}

TEST(Attack, MinorityCollusionMissesQuorum) {
  auto out = attack_after_setup({AttackCategory::FiftyOnePercent, {"s1", "s2"}, kFull, "minority"}, 2, 3,
                                flexi::consensus::FinalityMode::Exhaustive);
  EXPECT_FALSE(out.succeeded);
  EXPECT_EQ(out.blocked_at, ProtocolStage::FinalityQuorum);
}

TEST(Attack, PhishingWithFullSecretsSucceeds) {
  auto out = attack_after_setup({AttackCategory::Phishing, {"s1"}, kFull, "full"});
  EXPECT_TRUE(out.succeeded) << out.detail;
}

// Safety under partial compromise: lacking the module key or vault access,
// no category finalizes a fraudulent block in either mode, even when every
// node is targeted.
TEST(Attack, StrictSubsetsNeverFinalize) {
  const Secret all[] = {Secret::ConstructedKey, Secret::ModuleKey, Secret::VaultAccess, Secret::Tuid};
  int runs = 0;
  for (int cat = 1; cat <= 4; ++cat) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      SecretSet s;
      for (unsigned b = 0; b < 4; ++b) {
        if ((mask >> b) & 1u) s.add(all[b]);
      }
      if (s.has(Secret::ModuleKey) && s.has(Secret::VaultAccess)) continue;
      for (auto mode : {flexi::consensus::FinalityMode::Narrated, flexi::consensus::FinalityMode::Exhaustive}) {
        Metrics m;
        auto out = attack_after_setup({static_cast<AttackCategory>(cat), all_nodes(1, 2), s, "sweep"}, 1, 2, mode, &m);
        EXPECT_FALSE(out.succeeded) << "cat" << cat << " " << s.describe();
        EXPECT_NE(out.blocked_at, ProtocolStage::None);
        EXPECT_EQ(m.fraudulent_finalized, 0u);
        EXPECT_EQ(m.vault_remote_reads, 0u);
        ++runs;
      }
    }
  }
  EXPECT_EQ(runs, 4 * 12 * 2);
}

TEST(Attack, UnknownTargetIsAnError) {
  EXPECT_THROW(attack_after_setup({AttackCategory::Phishing, {"ghost"}, {}, "x"}), flexi::Error);
}

}  // namespace
