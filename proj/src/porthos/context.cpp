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

#include "triad/porthos/context.hpp"

#include <string>

#include "triad/error.hpp"

namespace triad::porthos {

namespace {

// PRF labels: one stream per key per session.
constexpr uint64_t kSharedLabel = 1;
constexpr uint64_t kLocalLabel = 2;

}  // namespace

std::string_view role_name(Role r) {
  switch (r) {
    case Role::P0:
      return "P0";
    case Role::P1:
      return "P1";
    case Role::P2:
      return "P2";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  if (s == "P0" || s == "0") return Role::P0;
  if (s == "P1" || s == "1") return Role::P1;
  if (s == "P2" || s == "2") return Role::P2;
  throw FormatError("unknown role '" + std::string(s) + "'");
}

PartyKeys test_keys(Role r, std::string_view seed) {
  const std::string s(seed);
  PartyKeys k;
  if (r != Role::P1) k.k0 = ring::key_from_seed(s + "/k0");
  if (r != Role::P0) k.k1 = ring::key_from_seed(s + "/k1");
  if (r != Role::P2) k.k01 = ring::key_from_seed(s + "/k01");
  k.entropy = ring::key_from_seed(s + "/entropy/" + std::string(role_name(r)));
  return k;
}

ProtocolContext::ProtocolContext(Role role, const PartyKeys& keys, std::array<net::Channel*, 3> peers)
    : role_(role), peers_(peers), local_(keys.entropy, kLocalLabel) {
  const std::optional<KeyBytes>* ks[3] = {&keys.k0, &keys.k1, &keys.k01};
  for (int i = 0; i < 3; ++i) {
    if (ks[i]->has_value()) shared_[static_cast<size_t>(i)].emplace(**ks[i], kSharedLabel);
  }
}

net::Channel& ProtocolContext::channel(Role peer) {
  net::Channel* c = peers_[static_cast<size_t>(peer)];
  TRIAD_ENFORCE(peer != role_ && c != nullptr, Error,
                std::string(role_name(role_)) + " has no channel to " + std::string(role_name(peer)));
  return *c;
}

PrfStream& ProtocolContext::prf(KeyId id) {
  auto& s = shared_[static_cast<size_t>(id)];
  TRIAD_ENFORCE(s.has_value(), Error, std::string(role_name(role_)) + " does not hold this PRF key");
  return *s;
}

uint64_t ProtocolContext::take_instances(uint64_t n) {
  const uint64_t base = instances_;
  instances_ += n;
  return base;
}

void ProtocolContext::send(Role to, RingId ring, std::span<const uint64_t> v) {
  std::vector<uint8_t> bytes;
  ring::encode_into(v, ring, bytes);
  channel(to).send(ring_tag(ring), bytes);
  by_protocol_[scopes_.empty() ? std::string("other") : scopes_.front()] +=
      static_cast<int64_t>(bytes.size());
}

std::vector<uint64_t> ProtocolContext::recv(Role from, RingId ring, size_t count) {
  net::Frame f = channel(from).recv();
  TRIAD_ENFORCE(f.tag == ring_tag(ring), FormatError,
                "expected " + std::string(ring::ring_name(ring)) + " data from " +
                    std::string(role_name(from)) + ", got tag " + std::to_string(f.tag));
  TRIAD_ENFORCE(f.payload.size() == count * ring::wire_bytes(ring), FormatError,
                "message from " + std::string(role_name(from)) + " has " +
                    std::to_string(f.payload.size()) + " bytes, expected " +
                    std::to_string(count * ring::wire_bytes(ring)));
  return ring::decode(ring, {static_cast<int64_t>(count)}, f.payload).vec();
}

std::vector<uint64_t> ProtocolContext::exchange(RingId ring, std::span<const uint64_t> mine) {
  TRIAD_ENFORCE(!is_p2(), Error, "P2 takes no part in a P0/P1 exchange");
  if (role_ == Role::P0) {
    send(Role::P1, ring, mine);
    return recv(Role::P1, ring, mine.size());
  }
  auto theirs = recv(Role::P0, ring, mine.size());
  send(Role::P0, ring, mine);
  return theirs;
}

void ProtocolContext::clear_stats() {
  by_protocol_.clear();
  ops_ = {};
  fresh_log_.clear();
}

ProtocolContext::Scope::Scope(ProtocolContext& ctx, std::string name) : ctx_(ctx) {
  ctx_.scopes_.push_back(std::move(name));
}

ProtocolContext::Scope::~Scope() { ctx_.scopes_.pop_back(); }

}  // namespace triad::porthos
