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
#include <optional>
#include <string>

#include "triad/aramis/attest.hpp"
#include "triad/net/channel.hpp"
#include "triad/porthos/context.hpp"

namespace triad::aramis {

using porthos::Role;

struct AbortReport {
  uint64_t round = 0;
  std::string channel;  // "P2->P0": sender -> detecting party
  std::string check;    // token, truncated, counter, signature, timeout, peer-closed
  std::string strategy;

  std::string to_json() const;
};

class ProtocolAbort : public Error {
 public:
  explicit ProtocolAbort(AbortReport r)
      : Error("abort: " + r.check + " on " + r.channel + " round " + std::to_string(r.round)),
        report_(std::move(r)) {}
  const AbortReport& report() const { return report_; }

 private:
  AbortReport report_;
};

constexpr uint8_t direction_tag(Role from, Role to) {
  return static_cast<uint8_t>(3 * static_cast<uint8_t>(from) + static_cast<uint8_t>(to));
}

std::string channel_name(Role from, Role to);

// Bytes covered by a message signature: tag || payload || u64 ctr || u8 dir.
Bytes signing_payload(uint8_t tag, std::span<const uint8_t> payload, uint64_t ctr, uint8_t dir);

// Wire payload of an attested frame: payload || u64 ctr || signature.
inline constexpr size_t kTrailerBytes = 8 + 64;

// Signs every outgoing frame with the party's functionality and verifies
// every incoming frame against the peer's key and the expected per-channel
// counter. Any failure throws ProtocolAbort.
class AttestedChannel : public net::Channel {
 public:
  AttestedChannel(net::Channel& inner, AttestFunctionality& fa, Role self, Role peer, TranscriptChain* chain)
      : inner_(inner), fa_(fa), self_(self), peer_(peer), chain_(chain) {
    set_timeout(inner.timeout());
  }

  void set_peer_key(const VerifyKey& vk) { peer_vk_ = vk; }
  void close() override { inner_.close(); }
  void set_timeout(std::chrono::milliseconds t) override {
    Channel::set_timeout(t);
    inner_.set_timeout(t);
  }
  uint64_t sent() const { return send_ctr_; }
  uint64_t received() const { return recv_ctr_; }

 protected:
  void do_send(net::Frame f) override;
  net::Frame do_recv() override;

 private:
  [[noreturn]] void abort(const std::string& check, uint64_t round) const;

  net::Channel& inner_;
  AttestFunctionality& fa_;
  Role self_, peer_;
  TranscriptChain* chain_;
  std::optional<VerifyKey> peer_vk_;
  uint64_t send_ctr_ = 0;
  uint64_t recv_ctr_ = 0;
};

// Semi-honest counterpart: forwards frames unchanged and records the same
// transcript chain, so plain and attested runs can be compared.
class RecordingChannel : public net::Channel {
 public:
  RecordingChannel(net::Channel& inner, Role self, Role peer, TranscriptChain* chain)
      : inner_(inner), self_(self), peer_(peer), chain_(chain) {
    set_timeout(inner.timeout());
  }
  void close() override { inner_.close(); }
  void set_timeout(std::chrono::milliseconds t) override {
    Channel::set_timeout(t);
    inner_.set_timeout(t);
  }

 protected:
  void do_send(net::Frame f) override;
  net::Frame do_recv() override;

 private:
  net::Channel& inner_;
  Role self_, peer_;
  TranscriptChain* chain_;
  uint64_t send_ctr_ = 0;
  uint64_t recv_ctr_ = 0;
};

}  // namespace triad::aramis
