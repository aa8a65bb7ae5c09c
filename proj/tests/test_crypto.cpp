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

#include <string>

#include "flexichain/crypto.hpp"
#include "support/oracle.hpp"

namespace {

using flexi::Bytes;
using flexi::to_bytes;
using flexi::to_hex;

struct ScryptVector {
  std::string password;
  std::string salt;
  std::uint64_t n;
  std::uint32_t r;
  std::uint32_t p;
  std::string expected;
};

// RFC 7914 section 12. The 1 GiB vector runs in the acceptance binary.
const ScryptVector kRfc7914[] = {
    {"", "", 16, 1, 1,
     "77d6576238657b203b19ca42c18a0497f16b4844e3074ae8dfdffa3fede21442"
     "fcd0069ded0948f8326a753a0fc81f17e8d3e0fb2e0d3628cf35e20c38d18906"},
    {"password", "NaCl", 1024, 8, 16,
     "fdbabe1c9d3472007856e7190d01e9fe7c6ad7cbc8237830e77376634b373162"
     "2eaf30d92e22a3886ff109279d9830dac727afb94a83ee6d8360cbdfa2cc0640"},
    {"pleaseletmein", "SodiumChloride", 16384, 8, 1,
     "7023bdcb3afd7348461c06cd81fd38ebfda8fbba904f8e3ea9b543f6545da1f2"
     "d5432955613f0fcf62d49705242a9af9e61e85dc0d651e40dfcf017b45575887"},
};

TEST(Sha256, FipsEmptyString) {
  EXPECT_EQ(to_hex(flexi::crypto::sha256(Bytes{})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Sha256, FipsAbc) {
  EXPECT_EQ(to_hex(flexi::crypto::sha256(to_bytes("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, AgreesWithOpenSslOnVaryingLengths) {
  Bytes data;
  for (int len = 0; len < 300; ++len) {
    const auto ours = flexi::crypto::sha256(data);
    const auto ref = oracle::sha256(data);
    ASSERT_TRUE(std::equal(ours.begin(), ours.end(), ref.begin())) << "length " << len;
    data.push_back(static_cast<std::uint8_t>(len * 31 + 7));
  }
}

TEST(Sha256, MultiPartEqualsConcatenation) {
  const auto a = to_bytes("node");
  const auto b = to_bytes("chain");
  EXPECT_EQ(flexi::crypto::sha256({flexi::ByteView(a), flexi::ByteView(b)}),
            flexi::crypto::sha256(to_bytes("nodechain")));
}

class ScryptRfc : public ::testing::TestWithParam<ScryptVector> {};

TEST_P(ScryptRfc, MatchesReferenceVector) {
  const auto& v = GetParam();
  const auto out = flexi::crypto::scrypt(to_bytes(v.password), to_bytes(v.salt), v.n, v.r, v.p, 64);
  EXPECT_EQ(to_hex(out), v.expected);
}

TEST_P(ScryptRfc, AgreesWithOpenSsl) {
  const auto& v = GetParam();
  const auto out = flexi::crypto::scrypt(to_bytes(v.password), to_bytes(v.salt), v.n, v.r, v.p, 64);
  EXPECT_EQ(out, oracle::scrypt(v.password, to_bytes(v.salt), v.n, v.r, v.p, 64));
}

INSTANTIATE_TEST_SUITE_P(Rfc7914, ScryptRfc, ::testing::ValuesIn(kRfc7914));

TEST(Scrypt, RejectsNonPowerOfTwoCost) {
  EXPECT_THROW(flexi::crypto::scrypt(to_bytes("x"), to_bytes("y"), 1000, 8, 1, 32), flexi::Error);
  EXPECT_THROW(flexi::crypto::scrypt(to_bytes("x"), to_bytes("y"), 1, 8, 1, 32), flexi::Error);
}

TEST(Scrypt, RejectsZeroParameters) {
  EXPECT_THROW(flexi::crypto::scrypt(to_bytes("x"), to_bytes("y"), 16, 0, 1, 32), flexi::Error);
  EXPECT_THROW(flexi::crypto::scrypt(to_bytes("x"), to_bytes("y"), 16, 1, 0, 32), flexi::Error);
  EXPECT_THROW(flexi::crypto::scrypt(to_bytes("x"), to_bytes("y"), 16, 1, 1, 0), flexi::Error);
}

TEST(Ed25519, SeedDeterminesKeyPair) {
  flexi::Digest seed{};
  seed[0] = 7;
  const auto a = flexi::crypto::keypair_from_seed(seed);
  const auto b = flexi::crypto::keypair_from_seed(seed);
  EXPECT_EQ(a.public_key, b.public_key);
  seed[0] = 8;
  EXPECT_NE(a.public_key, flexi::crypto::keypair_from_seed(seed).public_key);
}

TEST(Ed25519, SignVerifyAndTamper) {
  const auto kp = flexi::crypto::keypair_from_seed(flexi::Digest{});
  auto msg = to_bytes("enroll");
  const auto sig = flexi::crypto::sign(kp.secret_key, msg);
  EXPECT_TRUE(flexi::crypto::verify(kp.public_key, msg, sig));
  msg[0] ^= 1;
  EXPECT_FALSE(flexi::crypto::verify(kp.public_key, msg, sig));
}

TEST(Ed25519, PublicKeyValidity) {
  const auto kp = flexi::crypto::keypair_from_seed(flexi::Digest{});
  EXPECT_TRUE(flexi::crypto::is_valid_public_key(Bytes(kp.public_key.begin(), kp.public_key.end())));
  EXPECT_FALSE(flexi::crypto::is_valid_public_key(Bytes(31, 1)));
  EXPECT_FALSE(flexi::crypto::is_valid_public_key(Bytes(32, 0)));
}

TEST(ConstantTimeEqual, ComparesContentAndLength) {
  EXPECT_TRUE(flexi::crypto::constant_time_equal(to_bytes("abc"), to_bytes("abc")));
  EXPECT_FALSE(flexi::crypto::constant_time_equal(to_bytes("abc"), to_bytes("abd")));
  EXPECT_FALSE(flexi::crypto::constant_time_equal(to_bytes("abc"), to_bytes("ab")));
}

}  // namespace
