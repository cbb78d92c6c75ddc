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
#include <optional>
#include <span>
#include <string_view>

#include "triad/ring/tensor.hpp"

namespace triad::ring {

using KeyBytes = std::array<uint8_t, 16>;

// Derive a 128-bit key from a seed string (SHA-256, truncated). Test mode
// only; live sessions draw keys from the OS.
KeyBytes key_from_seed(std::string_view seed);
KeyBytes random_key();

// Zp rejection rule for one raw byte: accepted iff b < 3 * 67 = 201, value
// b mod 67.
inline std::optional<uint64_t> zp_accept(uint8_t b) {
  if (b >= 3 * kPrime) return std::nullopt;
  return b % kPrime;
}

// A deterministic, seekable pseudorandom stream: AES-128 over the blocks
// (label || counter), both little-endian u64. Distinct labels under one key
// never overlap.
class PrfStream {
 public:
  PrfStream(const KeyBytes& key, uint64_t label, uint64_t counter = 0);
  PrfStream(const PrfStream& o);
  PrfStream& operator=(const PrfStream& o);
  PrfStream(PrfStream&&) noexcept;
  PrfStream& operator=(PrfStream&&) noexcept;
  ~PrfStream();

  const KeyBytes& key() const { return key_; }
  uint64_t label() const { return label_; }
  // Index of the next block the cipher will produce. Output is buffered, so
  // bytes already drawn may lie in earlier blocks.
  uint64_t counter() const { return counter_; }
  // Discard buffered output and continue from block `counter`. Rewinding is
  // allowed only for replay; fresh draws must never revisit a block.
  void seek(uint64_t counter);

  void fill(std::span<uint8_t> out);
  uint64_t next_u64();
  uint8_t next_byte();
  // Uniform over [0, 67) by rejection: accept a byte iff it is < 201.
  uint64_t next_zp();
  // Uniform over [1, 67).
  uint64_t next_zp_nonzero();
  // Uniform over [0, 2^64 - 1).
  uint64_t next_zlm1();
  uint64_t next_bit();

  uint64_t next(RingId ring);
  void expand_into(RingId ring, std::span<uint64_t> out);
  RingTensor expand(RingId ring, const Shape& shape);

 private:
  void refill();

  KeyBytes key_;
  uint64_t label_;
  uint64_t counter_;
  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  static constexpr size_t kBufBlocks = 64;
  std::array<uint8_t, kBufBlocks * 16> buf_{};
  size_t pos_ = 0;
  size_t len_ = 0;
};

// prf_expand: `count` elements drawn from the stream, as a rank-1 tensor.
RingTensor prf_expand(PrfStream& stream, RingId ring, int64_t count);

}  // namespace triad::ring
