// Copyright 2026 The Triad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "triad/aramis/crypto.hpp"
#include "triad/error.hpp"
#include "triad/ring/prf.hpp"

namespace triad::aramis {

// Binds a code hash to a functionality verification key under the root key.
struct AttestToken {
  static constexpr uint8_t kVersion = 1;
  static constexpr size_t kBytes = 1 + 32 + 32 + 64;

  uint8_t version = kVersion;
  Digest code_hash{};
  VerifyKey vk{};
  Signature root_sig{};

  Bytes body() const;
  Bytes serialize() const;
  static AttestToken parse(std::span<const uint8_t> bytes);

  bool operator==(const AttestToken&) const = default;
};

bool verify_token(const AttestToken& t, const VerifyKey& root_vk);

// Local stand-in for the attestation service: its verification key is
// distributed out of band.
class RootAuthority {
 public:
  explicit RootAuthority(SigningKey key) : key_(std::move(key)) {}

  const VerifyKey& verify_key() const { return key_.verify_key(); }
  AttestToken endorse(uint32_t party, const Digest& code_hash, const VerifyKey& vk);
  std::optional<VerifyKey> registered(uint32_t party) const;

 private:
  SigningKey key_;
  std::map<uint32_t, VerifyKey> registry_;
};

class AttestHalted : public Error {
 public:
  using Error::Error;
};

// Signed functionality state. state_0 has ctr 0 and an all-zero digest.
struct AttestState {
  uint64_t ctr = 0;
  Digest digest{};
  Signature sig{};

  bool operator==(const AttestState&) const = default;
};

struct AttestOutput {
  Bytes y;
  uint64_t ctr = 0;
  Signature sig{};  // over y || u64 ctr
  AttestState state;
  Bytes randomness;  // r_ctr, readable by the host
};

// g(ctr, w_ctr, r_ctr, state_{ctr-1})
using NextMessageFn =
    std::function<Bytes(uint64_t ctr, std::span<const uint8_t> w, std::span<const uint8_t> r, const AttestState& prev)>;

// Software attested-execution functionality: integrity through signatures,
// no confidentiality from the host.
class AttestFunctionality {
 public:
  AttestFunctionality(SigningKey key, RootAuthority& root, uint32_t party, const ring::KeyBytes& entropy);

  const VerifyKey& verify_key() const { return key_.verify_key(); }
  bool committed() const { return committed_; }
  bool halted() const { return halted_; }
  uint64_t ctr() const { return ctr_; }

  // First call returns state_0 and the token; further calls return nullopt.
  std::optional<std::pair<AttestState, AttestToken>> commit(const Digest& code_hash, NextMessageFn g);

  // Verifies prev against the functionality's own record, then evaluates g.
  // Throws AttestHalted (and stays halted) on a stale or forged state.
  AttestOutput compute(const AttestState& prev, std::span<const uint8_t> w);

  // Deterministic re-evaluation for audit.
  Bytes replay(uint64_t ctr, std::span<const uint8_t> w, std::span<const uint8_t> r, const AttestState& prev) const;

  // Signature on an outgoing protocol message.
  Signature sign_message(std::span<const uint8_t> msg);

  static Bytes output_body(std::span<const uint8_t> y, uint64_t ctr);
  static Bytes state_body(uint64_t ctr, const Digest& digest);

 private:
  void halt(const std::string& why);

  SigningKey key_;
  RootAuthority& root_;
  uint32_t party_;
  ring::PrfStream rng_;
  NextMessageFn g_;
  bool committed_ = false;
  bool halted_ = false;
  uint64_t ctr_ = 0;
  Digest digest_{};
};

// Append-only hash chain over every message a party sends or receives.
class TranscriptChain {
 public:
  struct Entry {
    uint8_t dir;
    uint64_t ctr;
    uint8_t tag;
    Digest payload;
    Digest head;
  };

  void append(uint8_t dir, uint64_t ctr, uint8_t tag, std::span<const uint8_t> payload);
  const Digest& head() const { return head_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Recompute every link; false if any entry was edited.
  static bool verify(const std::vector<Entry>& entries);

 private:
  static Digest link(const Digest& prev, uint8_t dir, uint64_t ctr, uint8_t tag, const Digest& payload);

  Digest head_{};
  std::vector<Entry> entries_;
};

}  // namespace triad::aramis
