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

#include "flexichain/scenario.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace flexi::netsim;

const std::string kMinimal = R"({
  "version": 1,
  "seed": 5,
  "kdf": {"cost": 16, "block_size": 1, "parallelism": 1, "salt": "abcd", "output_length": 64},
  "token_salt": "0102",
  "modules": ["tm-bn", "tm-en1"],
  "nodes": [
    {"name": "bn", "role": "backup", "module": "tm-bn"},
    {"name": "en1", "role": "edge", "module": "tm-en1"}
  ],
  "script": [
    {"at": 1, "do": "join", "node": "en1"},
    {"at": 4, "do": "attack", "category": 2, "targets": ["en1"], "secrets": ["constructed_key", "tuid"]}
  ]
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const flexi::Error& e) {
    EXPECT_EQ(e.code(), flexi::ErrorCode::ConfigError) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "parsed without error";
  return {};
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(ScenarioParse, MinimalDocument) {
  const auto c = parse_scenario_text(kMinimal);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.kdf.cost, 16u);
  EXPECT_EQ(c.kdf.output_length, 64u);
  EXPECT_EQ(c.kdf.salt, (flexi::Bytes{0xab, 0xcd}));
  EXPECT_EQ(c.token_salt, (flexi::Bytes{1, 2}));
  ASSERT_EQ(c.nodes.size(), 2u);
  EXPECT_EQ(c.nodes[1].role, flexi::NodeRole::EdgeNode);
  ASSERT_EQ(c.script.size(), 2u);
  EXPECT_EQ(c.script[1].attack.category, AttackCategory::Phishing);
  EXPECT_TRUE(c.script[1].attack.secrets.has(Secret::Tuid));
  EXPECT_FALSE(c.script[1].attack.secrets.has(Secret::VaultAccess));
  EXPECT_EQ(c.finality, flexi::consensus::FinalityMode::Narrated);
}

TEST(ScenarioParse, ErrorsNameTheKey) {
  EXPECT_NE(error_of("{").find("$"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("version": 1)", R"("version": 2)")).find("version"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("token_salt": "0102",)", "")).find("token_salt"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("token_salt": "0102")", R"("token_salt": "xyz")")).find("token_salt"),
            std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("role": "edge")", R"("role": "miner")")).find("nodes[1].role"),
            std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("do": "join")", R"("do": "dance")")).find("script[0].do"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("category": 2)", R"("category": 7)")).find("script[1].category"),
            std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("tuid"])", R"("root"])")).find("script[1].secrets[1]"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("node": "en1"})", R"("node": "zz"})")).find("script[0].node"),
            std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("cost": 16)", R"("cost": 15)")).find("kdf"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("cost": 16)", R"("cost": -1)")).find("kdf.cost"), std::string::npos);
  EXPECT_NE(error_of(with(kMinimal, R"("at": 4)", R"("at": 0)")).find("script[1].at"), std::string::npos);
}

TEST(ScenarioParse, BundledScenariosLoadAndRun) {
  for (const auto* name : {"demo4.json", "spf_failover.json", "attacks.json", "enroll64.json"}) {
    const auto c = load_scenario(std::string(FLEXICHAIN_SCENARIO_DIR) + "/" + name);
    EXPECT_NO_THROW(run_scenario(c)) << name;
  }
}

TEST(ScenarioParse, MissingFileIsIoError) {
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const flexi::Error& e) {
    EXPECT_EQ(e.code(), flexi::ErrorCode::IoError);
  }
}

TEST(ScenarioParse, ModeNames) {
  EXPECT_EQ(parse_finality_mode("exhaustive"), flexi::consensus::FinalityMode::Exhaustive);
  EXPECT_EQ(parse_finality_mode("narrated"), flexi::consensus::FinalityMode::Narrated);
  EXPECT_THROW(parse_finality_mode("quick"), flexi::Error);
}

}  // namespace
