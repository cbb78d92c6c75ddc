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

#include "triad/aramis/attest.hpp"

#include <algorithm>

namespace triad::aramis {

Bytes AttestToken::body() const {
  Bytes b(code_hash.begin(), code_hash.end());
  b.insert(b.end(), vk.begin(), vk.end());
  return b;
}

Bytes AttestToken::serialize() const {
  Bytes b{version};
  b.insert(b.end(), code_hash.begin(), code_hash.end());
  b.insert(b.end(), vk.begin(), vk.end());
  b.insert(b.end(), root_sig.begin(), root_sig.end());
  return b;
}

AttestToken AttestToken::parse(std::span<const uint8_t> bytes) {
  TRIAD_ENFORCE(bytes.size() == kBytes, FormatError,
                "token has " + std::to_string(bytes.size()) + " bytes, expected " + std::to_string(kBytes));
  TRIAD_ENFORCE(bytes[0] == kVersion, FormatError, "unsupported token version " + std::to_string(bytes[0]));
  AttestToken t;
  t.version = bytes[0];
  std::copy_n(bytes.begin() + 1, 32, t.code_hash.begin());
  std::copy_n(bytes.begin() + 33, 32, t.vk.begin());
  std::copy_n(bytes.begin() + 65, 64, t.root_sig.begin());
  return t;
}

bool verify_token(const AttestToken& t, const VerifyKey& root_vk) {
  return t.version == AttestToken::kVersion && verify(root_vk, t.body(), t.root_sig);
}

AttestToken RootAuthority::endorse(uint32_t party, const Digest& code_hash, const VerifyKey& vk) {
  AttestToken t;
  t.code_hash = code_hash;
  t.vk = vk;
  t.root_sig = key_.sign(t.body());
  registry_[party] = vk;
  return t;
}

std::optional<VerifyKey> RootAuthority::registered(uint32_t party) const {
  auto it = registry_.find(party);
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

AttestFunctionality::AttestFunctionality(SigningKey key, RootAuthority& root, uint32_t party,
                                         const ring::KeyBytes& entropy)
    : key_(std::move(key)), root_(root), party_(party), rng_(entropy, 3) {}

std::optional<std::pair<AttestState, AttestToken>> AttestFunctionality::commit(const Digest& code_hash,
                                                                               NextMessageFn g) {
  if (committed_) return std::nullopt;
  committed_ = true;
  g_ = std::move(g);
  AttestState s0;
  s0.sig = key_.sign(state_body(0, s0.digest));
  return std::make_pair(s0, root_.endorse(party_, code_hash, key_.verify_key()));
}

void AttestFunctionality::halt(const std::string& why) {
  halted_ = true;
  throw AttestHalted(why);
}

AttestOutput AttestFunctionality::compute(const AttestState& prev, std::span<const uint8_t> w) {
  if (!committed_) throw AttestHalted("compute before commit");
  if (halted_) throw AttestHalted("functionality halted");
  if (!verify(key_.verify_key(), state_body(prev.ctr, prev.digest), prev.sig)) halt("state signature invalid");
  if (prev.ctr != ctr_ || prev.digest != digest_) {
    halt("stale state: round " + std::to_string(prev.ctr) + ", expected " + std::to_string(ctr_));
  }
  AttestOutput out;
  out.ctr = ++ctr_;
  out.randomness.resize(16);
  rng_.fill(out.randomness);
  out.y = g_(out.ctr, w, out.randomness, prev);

  Bytes link(prev.digest.begin(), prev.digest.end());
  put_u64(link, out.ctr);
  for (auto part : {std::span<const uint8_t>(w), std::span<const uint8_t>(out.randomness),
                    std::span<const uint8_t>(out.y)}) {
    put_u64(link, part.size());
    link.insert(link.end(), part.begin(), part.end());
  }
  digest_ = sha256(link);
  out.state = {out.ctr, digest_, key_.sign(state_body(out.ctr, digest_))};
  out.sig = key_.sign(output_body(out.y, out.ctr));
  return out;
}

Bytes AttestFunctionality::replay(uint64_t ctr, std::span<const uint8_t> w, std::span<const uint8_t> r,
                                  const AttestState& prev) const {
  TRIAD_ENFORCE(committed_, Error, "replay before commit");
  return g_(ctr, w, r, prev);
}

Signature AttestFunctionality::sign_message(std::span<const uint8_t> msg) {
  if (!committed_) throw AttestHalted("signing before commit");
  if (halted_) throw AttestHalted("functionality halted");
  return key_.sign(msg);
}

Bytes AttestFunctionality::output_body(std::span<const uint8_t> y, uint64_t ctr) {
  Bytes b(y.begin(), y.end());
  put_u64(b, ctr);
  return b;
}

Bytes AttestFunctionality::state_body(uint64_t ctr, const Digest& digest) {
  Bytes b{'s', 't', 'a', 't', 'e'};
  put_u64(b, ctr);
  b.insert(b.end(), digest.begin(), digest.end());
  return b;
}

Digest TranscriptChain::link(const Digest& prev, uint8_t dir, uint64_t ctr, uint8_t tag, const Digest& payload) {
  Bytes b(prev.begin(), prev.end());
  b.push_back(dir);
  put_u64(b, ctr);
  b.push_back(tag);
  b.insert(b.end(), payload.begin(), payload.end());
  return sha256(b);
}

void TranscriptChain::append(uint8_t dir, uint64_t ctr, uint8_t tag, std::span<const uint8_t> payload) {
  const Digest pd = sha256(payload);
  head_ = link(head_, dir, ctr, tag, pd);
  entries_.push_back({dir, ctr, tag, pd, head_});
}

bool TranscriptChain::verify(const std::vector<Entry>& entries) {
  Digest h{};
  for (const auto& e : entries) {
    h = link(h, e.dir, e.ctr, e.tag, e.payload);
    if (h != e.head) return false;
  }
  return true;
}

}  // namespace triad::aramis
