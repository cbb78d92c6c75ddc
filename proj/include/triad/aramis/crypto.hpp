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
#include <memory>
#include <span>
#include <string>
#include <vector>

struct evp_pkey_st;

namespace triad::aramis {

using Digest = std::array<uint8_t, 32>;
using VerifyKey = std::array<uint8_t, 32>;
using Signature = std::array<uint8_t, 64>;
using Bytes = std::vector<uint8_t>;

Digest sha256(std::span<const uint8_t> data);
Digest sha256(const std::string& s);
std::string hex(std::span<const uint8_t> b);

// Ed25519 secret key.
class SigningKey {
 public:
  static SigningKey generate();
  static SigningKey from_seed(const std::array<uint8_t, 32>& seed);
  static SigningKey from_seed(const std::string& seed) { return from_seed(sha256(seed)); }

  const VerifyKey& verify_key() const { return vk_; }
  Signature sign(std::span<const uint8_t> msg) const;

 private:
  std::shared_ptr<evp_pkey_st> pkey_;
  VerifyKey vk_{};
};

bool verify(const VerifyKey& vk, std::span<const uint8_t> msg, const Signature& sig);

// Little-endian helpers for canonical encodings.
inline void put_u64(Bytes& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
inline uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace triad::aramis
