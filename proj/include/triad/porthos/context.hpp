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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triad/net/channel.hpp"
#include "triad/ring/prf.hpp"

namespace triad::porthos {

using ring::KeyBytes;
using ring::PrfStream;
using ring::RingId;
using ring::RingTensor;
using ring::Shape;

enum class Role : uint8_t { P0 = 0, P1 = 1, P2 = 2 };

std::string_view role_name(Role r);
Role parse_role(std::string_view s);

// k0 is shared by P0 and P2, k1 by P1 and P2, k01 by P0 and P1. `entropy`
// seeds the party's private randomness.
struct PartyKeys {
  std::optional<KeyBytes> k0, k1, k01;
  KeyBytes entropy{};
};

enum class KeyId : uint8_t { K0, K1, K01 };

// Deterministic keys for test mode; each role only receives the keys it is
// entitled to.
PartyKeys test_keys(Role r, std::string_view seed);

struct OpCounters {
  int64_t relu = 0;
  int64_t comparisons = 0;
  int64_t scaledown_elems = 0;
};

// One fresh-sharing step run by P2: how many instances had their share sent
// to P0 and to P1 (the other share came from a PRF).
struct FreshShareRecord {
  std::string step;
  int64_t to_p0 = 0;
  int64_t to_p1 = 0;
  int64_t elems_per_instance = 0;
};

class ProtocolContext {
 public:
  // `peers` is indexed by role; the entry for this party's own role is unused.
  ProtocolContext(Role role, const PartyKeys& keys, std::array<net::Channel*, 3> peers);

  Role role() const { return role_; }
  bool is_p2() const { return role_ == Role::P2; }
  // Party index j in the share formulas: 0 for P0, 1 for P1.
  uint64_t j() const { return role_ == Role::P1 ? 1 : 0; }
  Role other() const { return role_ == Role::P0 ? Role::P1 : Role::P0; }

  net::Channel& channel(Role peer);
  PrfStream& prf(KeyId id);
  PrfStream& local() { return local_; }

  // Reserve `n` consecutive fresh-share instance numbers.
  uint64_t take_instances(uint64_t n);
  uint64_t instance_counter() const { return instances_; }

  void send(Role to, RingId ring, std::span<const uint64_t> v);
  std::vector<uint64_t> recv(Role from, RingId ring, size_t count);
  // P0 <-> P1 swap of equal-length vectors; P0 sends first.
  std::vector<uint64_t> exchange(RingId ring, std::span<const uint64_t> mine);

  // Payload bytes this party sent, attributed to the outermost open scope.
  const std::map<std::string, int64_t>& bytes_by_protocol() const { return by_protocol_; }
  OpCounters& ops() { return ops_; }
  const OpCounters& ops() const { return ops_; }
  std::vector<FreshShareRecord>& fresh_log() { return fresh_log_; }
  void clear_stats();

  class Scope {
   public:
    Scope(ProtocolContext& ctx, std::string name);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    ProtocolContext& ctx_;
  };

 private:
  Role role_;
  std::array<net::Channel*, 3> peers_;
  std::array<std::optional<PrfStream>, 3> shared_;
  PrfStream local_;
  uint64_t instances_ = 0;
  std::vector<std::string> scopes_;
  std::map<std::string, int64_t> by_protocol_;
  OpCounters ops_;
  std::vector<FreshShareRecord> fresh_log_;
};

// Frame tag carrying ring elements of the given ring.
constexpr uint8_t ring_tag(RingId r) { return static_cast<uint8_t>(0x10 | static_cast<uint8_t>(r)); }

}  // namespace triad::porthos
