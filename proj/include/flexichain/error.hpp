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

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexi {

/// Every failure the protocol library can report. Each module throws
/// `flexi::Error` carrying one of these codes; callers branch on `code()`.
enum class ErrorCode {
  // identity
  InvalidParameters,
  InvalidKdf,
  // nodechain
  AlreadyInitialized,
  StaleState,
  IntegrityViolation,
  EmptyChain,
  UnknownNode,
  // dag ledger
  NoTransactions,
  UnknownBranch,
  DuplicateBranch,
  InvalidBlock,
  // consensus
  UnknownModule,
  ModuleConsumed,
  BadSignature,
  AlreadyEnrolled,
  Unauthorized,
  IdentityMismatch,
  EmptyRoster,
  // vault
  IndexGap,
  DuplicateIdentity,
  ConsistencyViolation,
  OfflineViolation,
  // netsim / secmodel / io
  ConfigError,
  DomainError,
  NotTabulated,
  IoError,
  Malformed,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::InvalidKdf: return "InvalidKdf";
    case ErrorCode::AlreadyInitialized: return "AlreadyInitialized";
    case ErrorCode::StaleState: return "StaleState";
    case ErrorCode::IntegrityViolation: return "IntegrityViolation";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NoTransactions: return "NoTransactions";
    case ErrorCode::UnknownBranch: return "UnknownBranch";
    case ErrorCode::DuplicateBranch: return "DuplicateBranch";
    case ErrorCode::InvalidBlock: return "InvalidBlock";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::ModuleConsumed: return "ModuleConsumed";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::AlreadyEnrolled: return "AlreadyEnrolled";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::IdentityMismatch: return "IdentityMismatch";
    case ErrorCode::EmptyRoster: return "EmptyRoster";
    case ErrorCode::IndexGap: return "IndexGap";
    case ErrorCode::DuplicateIdentity: return "DuplicateIdentity";
    case ErrorCode::ConsistencyViolation: return "ConsistencyViolation";
    case ErrorCode::OfflineViolation: return "OfflineViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotTabulated: return "NotTabulated";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Malformed: return "Malformed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace flexi
