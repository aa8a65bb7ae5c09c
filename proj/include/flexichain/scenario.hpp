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

// Scenario files are JSON (format version 1, see docs/formats.md). Every
// parse failure is a ConfigError whose message starts with the key path.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "flexichain/error.hpp"
#include "flexichain/netsim.hpp"

namespace flexi::netsim {

inline constexpr int kScenarioVersion = 1;

namespace detail {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& path, const std::string& what) {
  fail(ErrorCode::ConfigError, path + ": " + what);
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) bad(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(path + "." + key, "missing");
  return *it;
}

inline std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

inline Bytes as_hex(const json& v, const std::string& path) {
  try {
    return from_hex(as_string(v, path));
  } catch (const Error&) {
    bad(path, "expected an even-length hex string");
  }
}

inline NodeRole parse_role(const std::string& s, const std::string& path) {
  if (s == "backup") return NodeRole::BackupNode;
  if (s == "edge") return NodeRole::EdgeNode;
  if (s == "subscriber") return NodeRole::Subscriber;
  if (s == "cps") return NodeRole::CpsIot;
  bad(path, "unknown role '" + s + "' (backup|edge|subscriber|cps)");
}

inline EventKind parse_kind(const std::string& s, const std::string& path) {
  for (auto k : {EventKind::Join, EventKind::RegisterBranch, EventKind::Transaction, EventKind::Seal,
                 EventKind::Attack, EventKind::Disable, EventKind::Enable, EventKind::Sync, EventKind::ReportParams,
                 EventKind::VaultQuery}) {
    if (s == to_string(k)) return k;
  }
  bad(path, "unknown action '" + s + "'");
}

inline AttackCategory parse_category(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    auto c = v.get<std::int64_t>();
    if (c >= 1 && c <= 4) return static_cast<AttackCategory>(c);
    bad(path, "category must be 1..4");
  }
  const auto s = as_string(v, path);
  for (auto c : {AttackCategory::Sybil, AttackCategory::Phishing, AttackCategory::FiftyOnePercent,
                 AttackCategory::BruteForce}) {
    if (s == to_string(c)) return c;
  }
  bad(path, "unknown category '" + s + "'");
}

inline Secret parse_secret(const std::string& s, const std::string& path) {
  if (s == "constructed_key") return Secret::ConstructedKey;
  if (s == "module_key") return Secret::ModuleKey;
  if (s == "vault_access") return Secret::VaultAccess;
  if (s == "tuid") return Secret::Tuid;
  bad(path, "unknown secret '" + s + "'");
}

inline std::vector<std::string> string_list(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline ScriptEvent parse_event(const json& e, const std::string& path) {
  ScriptEvent ev;
  ev.at = as_u64(require(e, path, "at"), path + ".at");
  ev.kind = parse_kind(as_string(require(e, path, "do"), path + ".do"), path + ".do");
  auto opt_string = [&](const char* key, std::string& dst) {
    if (auto it = e.find(key); it != e.end()) dst = as_string(*it, path + "." + key);
  };
  switch (ev.kind) {
    case EventKind::RegisterBranch:
      ev.branch = as_string(require(e, path, "branch"), path + ".branch");
      break;
    case EventKind::Transaction:
      ev.node = as_string(require(e, path, "node"), path + ".node");
      ev.branch = as_string(require(e, path, "branch"), path + ".branch");
      if (auto it = e.find("payload"); it != e.end()) ev.payload = to_bytes(as_string(*it, path + ".payload"));
      break;
    case EventKind::Seal:
      ev.node = as_string(require(e, path, "node"), path + ".node");
      ev.branch = as_string(require(e, path, "branch"), path + ".branch");
      break;
    case EventKind::VaultQuery:
      ev.node = as_string(require(e, path, "node"), path + ".node");
      ev.target = as_string(require(e, path, "target"), path + ".target");
      break;
    case EventKind::ReportParams:
      ev.node = as_string(require(e, path, "node"), path + ".node");
      if (auto it = e.find("mutate_mac"); it != e.end()) {
        if (!it->is_boolean()) bad(path + ".mutate_mac", "expected a boolean");
        ev.mutate_mac = it->get<bool>();
      }
      break;
    case EventKind::Attack: {
      ev.attack.category = parse_category(require(e, path, "category"), path + ".category");
      if (auto it = e.find("targets"); it != e.end()) ev.attack.targets = string_list(*it, path + ".targets");
      if (auto it = e.find("secrets"); it != e.end()) {
        const auto names = string_list(*it, path + ".secrets");
        for (std::size_t i = 0; i < names.size(); ++i) {
          ev.attack.secrets.add(parse_secret(names[i], path + ".secrets[" + std::to_string(i) + "]"));
        }
      }
      opt_string("label", ev.attack.label);
      if (ev.attack.label.empty()) ev.attack.label = path;
      break;
    }
    default:
      ev.node = as_string(require(e, path, "node"), path + ".node");
  }
  return ev;
}

}  // namespace detail

inline consensus::FinalityMode parse_finality_mode(const std::string& s) {
  if (s == "exhaustive") return consensus::FinalityMode::Exhaustive;
  if (s == "narrated") return consensus::FinalityMode::Narrated;
  fail(ErrorCode::ConfigError, "finality.mode: unknown mode '" + s + "' (exhaustive|narrated)");
}

inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  using detail::as_hex;
  using detail::as_string;
  using detail::as_u64;
  using detail::bad;
  using detail::require;

  if (!doc.is_object()) bad("$", "expected an object");
  ScenarioConfig cfg;
  const auto version = as_u64(require(doc, "$", "version"), "version");
  if (version != kScenarioVersion) bad("version", "unsupported version " + std::to_string(version));
  if (auto it = doc.find("seed"); it != doc.end()) cfg.seed = as_u64(*it, "seed");

  if (auto it = doc.find("finality"); it != doc.end()) {
    if (auto m = it->find("mode"); m != it->end()) cfg.finality = parse_finality_mode(as_string(*m, "finality.mode"));
    if (auto l = it->find("latest"); l != it->end()) {
      cfg.narrated_latest = as_u64(*l, "finality.latest");
      if (cfg.narrated_latest == 0) bad("finality.latest", "must be >= 1");
    }
  }

  if (auto it = doc.find("kdf"); it != doc.end()) {
    const auto& k = *it;
    if (!k.is_object()) bad("kdf", "expected an object");
    if (auto v = k.find("cost"); v != k.end()) cfg.kdf.cost = as_u64(*v, "kdf.cost");
    if (auto v = k.find("block_size"); v != k.end()) cfg.kdf.block_size = static_cast<std::uint32_t>(as_u64(*v, "kdf.block_size"));
    if (auto v = k.find("parallelism"); v != k.end()) cfg.kdf.parallelism = static_cast<std::uint32_t>(as_u64(*v, "kdf.parallelism"));
    if (auto v = k.find("salt"); v != k.end()) cfg.kdf.salt = as_hex(*v, "kdf.salt");
    if (auto v = k.find("output_length"); v != k.end()) cfg.kdf.output_length = as_u64(*v, "kdf.output_length");
  }
  cfg.token_salt = as_hex(require(doc, "$", "token_salt"), "token_salt");
  cfg.modules = detail::string_list(require(doc, "$", "modules"), "modules");

  const auto& nodes = require(doc, "$", "nodes");
  if (!nodes.is_array() || nodes.empty()) bad("nodes", "expected a non-empty array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    NodeSpec n;
    n.name = as_string(require(nodes[i], path, "name"), path + ".name");
    n.role = detail::parse_role(as_string(require(nodes[i], path, "role"), path + ".role"), path + ".role");
    n.module_id = as_string(require(nodes[i], path, "module"), path + ".module");
    if (auto e = nodes[i].find("edge"); e != nodes[i].end()) n.edge = as_string(*e, path + ".edge");
    cfg.nodes.push_back(std::move(n));
  }

  if (auto it = doc.find("script"); it != doc.end()) {
    if (!it->is_array()) bad("script", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      cfg.script.push_back(detail::parse_event((*it)[i], "script[" + std::to_string(i) + "]"));
    }
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("$: ") + e.what());
  }
  return parse_scenario(doc);
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace flexi::netsim
