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

// Shared builders for unit tests. KDF costs are kept small so suites run in
// milliseconds; the default cost is exercised by the scenario tests.

#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "flexichain/consensus.hpp"
#include "flexichain/netsim.hpp"

namespace fixtures {

/// Error code thrown by `fn`; records a failure if nothing is thrown.
inline flexi::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const flexi::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a flexi::Error";
  return flexi::ErrorCode::Malformed;
}

inline flexi::identity::KdfParameters fast_kdf() {
  flexi::identity::KdfParameters k;
  k.cost = 16;
  k.block_size = 1;
  k.parallelism = 1;
  k.salt = flexi::to_bytes("test-kdf-salt");
  k.output_length = 128;
  return k;
}

inline flexi::Bytes token_salt() { return flexi::to_bytes("test-token-salt"); }

inline flexi::crypto::KeyPair constructed_key(const std::string& name) {
  return flexi::crypto::keypair_from_seed(flexi::netsim::derive_material(1, "constructed", name));
}

inline flexi::identity::ExtrinsicParameters params(const std::string& name) {
  return flexi::netsim::synthetic_fixture(1, name, constructed_key(name).public_key);
}

inline flexi::identity::TrustedModuleCredential module(const std::string& id) {
  auto kp = flexi::crypto::keypair_from_seed(flexi::netsim::derive_material(1, "trusted-module", id));
  return {id, kp.public_key, kp.secret_key};
}

/// A small network: one backup node, its module, and registered modules
/// for `extra` further nodes named n1..n<extra>.
struct Network {
  flexi::consensus::NetworkSecrets secrets{fast_kdf(), token_salt()};
  flexi::consensus::FullNodeState bn;
  flexi::identity::Uid bn_uid;

  explicit Network(int extra = 4) {
    bn.role = flexi::NodeRole::BackupNode;
    bn.vault = flexi::vault::Vault(token_salt());
    bn.registry.add("tm-bn", module("tm-bn").public_key);
    for (int i = 1; i <= extra; ++i) {
      const auto id = "tm-n" + std::to_string(i);
      bn.registry.add(id, module(id).public_key);
    }
    bn_uid = flexi::consensus::bootstrap_genesis(bn, params("bn"), "tm-bn", secrets, 0);
  }

  flexi::consensus::EnrollmentOutcome enroll(int i, std::uint64_t ts = 1) {
    const auto name = "n" + std::to_string(i);
    auto req = flexi::consensus::enroll_request(params(name), module("tm-" + name), bn.registry, {});
    return flexi::consensus::enroll_respond(bn, req, secrets, ts);
  }
};

}  // namespace fixtures
