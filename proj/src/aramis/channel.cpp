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

#include "triad/aramis/channel.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace triad::aramis {

std::string AbortReport::to_json() const {
  return nlohmann::json{{"round", round}, {"channel", channel}, {"check", check}, {"strategy", strategy}}.dump();
}

std::string channel_name(Role from, Role to) {
  return std::string(porthos::role_name(from)) + "->" + std::string(porthos::role_name(to));
}

Bytes signing_payload(uint8_t tag, std::span<const uint8_t> payload, uint64_t ctr, uint8_t dir) {
  Bytes b;
  b.reserve(payload.size() + 10);
  b.push_back(tag);
  b.insert(b.end(), payload.begin(), payload.end());
  put_u64(b, ctr);
  b.push_back(dir);
  return b;
}

void AttestedChannel::abort(const std::string& check, uint64_t round) const {
  throw ProtocolAbort({round, channel_name(peer_, self_), check, ""});
}

void AttestedChannel::do_send(net::Frame f) {
  const uint64_t ctr = send_ctr_;
  Signature sig;
  try {
    sig = fa_.sign_message(signing_payload(f.tag, f.payload, ctr, direction_tag(self_, peer_)));
  } catch (const AttestHalted&) {
    throw ProtocolAbort({ctr, channel_name(self_, peer_), "halted", ""});
  }
  if (chain_) chain_->append(direction_tag(self_, peer_), ctr, f.tag, f.payload);
  Bytes wire = std::move(f.payload);
  put_u64(wire, ctr);
  wire.insert(wire.end(), sig.begin(), sig.end());
  try {
    inner_.send(f.tag, wire);
  } catch (const PeerClosed&) {
    throw ProtocolAbort({ctr, channel_name(self_, peer_), "peer-closed", ""});
  }
  ++send_ctr_;
}

net::Frame AttestedChannel::do_recv() {
  TRIAD_ENFORCE(peer_vk_.has_value(), Error, "peer key not set on " + channel_name(peer_, self_));
  net::Frame f;
  try {
    f = inner_.recv();
  } catch (const Timeout&) {
    abort("timeout", recv_ctr_);
  } catch (const PeerClosed&) {
    abort("peer-closed", recv_ctr_);
  }
  if (f.payload.size() < kTrailerBytes) abort("truncated", recv_ctr_);
  const size_t body = f.payload.size() - kTrailerBytes;
  const uint64_t ctr = get_u64(f.payload.data() + body);
  if (ctr != recv_ctr_) abort("counter", recv_ctr_);
  Signature sig;
  std::copy_n(f.payload.begin() + static_cast<std::ptrdiff_t>(body + 8), 64, sig.begin());
  f.payload.resize(body);
  if (!verify(*peer_vk_, signing_payload(f.tag, f.payload, ctr, direction_tag(peer_, self_)), sig)) {
    abort("signature", recv_ctr_);
  }
  if (chain_) chain_->append(direction_tag(peer_, self_), ctr, f.tag, f.payload);
  ++recv_ctr_;
  return f;
}

void RecordingChannel::do_send(net::Frame f) {
  if (chain_) chain_->append(direction_tag(self_, peer_), send_ctr_, f.tag, f.payload);
  ++send_ctr_;
  inner_.send(f.tag, f.payload);
}

net::Frame RecordingChannel::do_recv() {
  net::Frame f = inner_.recv();
  if (chain_) chain_->append(direction_tag(peer_, self_), recv_ctr_, f.tag, f.payload);
  ++recv_ctr_;
  return f;
}

}  // namespace triad::aramis
