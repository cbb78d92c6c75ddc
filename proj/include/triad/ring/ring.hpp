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

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace triad::ring {

// The three rings the protocols operate over.
//   ZL   : Z_{2^64}
//   ZLm1 : Z_{2^64 - 1}
//   Zp   : Z_67, eight bits per element on the wire
enum class RingId : uint8_t { ZL = 0, ZLm1 = 1, Zp = 2 };

inline constexpr int kBitWidth = 64;
inline constexpr uint64_t kPrime = 67;
inline constexpr uint64_t kZLm1Modulus = ~uint64_t{0};  // 2^64 - 1

std::string_view ring_name(RingId r);

// Bytes per element in the canonical wire encoding.
constexpr size_t wire_bytes(RingId r) { return r == RingId::Zp ? 1 : 8; }

constexpr bool is_canonical(RingId r, uint64_t v) {
  switch (r) {
    case RingId::ZL:
      return true;
    case RingId::ZLm1:
      return v != kZLm1Modulus;
    case RingId::Zp:
      return v < kPrime;
  }
  return false;
}

// Element arithmetic. Inputs must be canonical.
namespace zlm1 {
constexpr uint64_t add(uint64_t a, uint64_t b) {
  uint64_t s = a + b;
  // a + b >= 2^64 - 1  <=>  carry, or no carry and s == 2^64 - 1.
  if (s < a || s == kZLm1Modulus) s += 1;
  return s;
}
constexpr uint64_t neg(uint64_t a) { return a == 0 ? 0 : kZLm1Modulus - a; }
constexpr uint64_t sub(uint64_t a, uint64_t b) { return add(a, neg(b)); }
constexpr uint64_t mul(uint64_t a, uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  // 2^64 == 1 (mod 2^64 - 1)
  uint64_t hi = static_cast<uint64_t>(p >> 64);
  uint64_t lo = static_cast<uint64_t>(p);
  uint64_t r = lo + hi;
  if (r < lo) r += 1;
  if (r == kZLm1Modulus) r = 0;
  return r;
}
// Reduce an arbitrary 64-bit word into [0, 2^64 - 1).
constexpr uint64_t reduce(uint64_t a) { return a == kZLm1Modulus ? 0 : a; }
}  // namespace zlm1

namespace zp {
constexpr uint64_t add(uint64_t a, uint64_t b) { return (a + b) % kPrime; }
constexpr uint64_t neg(uint64_t a) { return a == 0 ? 0 : kPrime - a; }
constexpr uint64_t sub(uint64_t a, uint64_t b) { return (a + kPrime - b) % kPrime; }
constexpr uint64_t mul(uint64_t a, uint64_t b) { return (a * b) % kPrime; }
}  // namespace zp

constexpr uint64_t add(RingId r, uint64_t a, uint64_t b) {
  switch (r) {
    case RingId::ZL:
      return a + b;
    case RingId::ZLm1:
      return zlm1::add(a, b);
    case RingId::Zp:
      return zp::add(a, b);
  }
  return 0;
}

constexpr uint64_t neg(RingId r, uint64_t a) {
  switch (r) {
    case RingId::ZL:
      return uint64_t{0} - a;
    case RingId::ZLm1:
      return zlm1::neg(a);
    case RingId::Zp:
      return zp::neg(a);
  }
  return 0;
}

constexpr uint64_t sub(RingId r, uint64_t a, uint64_t b) {
  switch (r) {
    case RingId::ZL:
      return a - b;
    case RingId::ZLm1:
      return zlm1::sub(a, b);
    case RingId::Zp:
      return zp::sub(a, b);
  }
  return 0;
}

constexpr uint64_t mul(RingId r, uint64_t a, uint64_t b) {
  switch (r) {
    case RingId::ZL:
      return a * b;
    case RingId::ZLm1:
      return zlm1::mul(a, b);
    case RingId::Zp:
      return zp::mul(a, b);
  }
  return 0;
}

// Map a small non-negative integer into the ring.
constexpr uint64_t from_uint(RingId r, uint64_t v) {
  switch (r) {
    case RingId::ZL:
      return v;
    case RingId::ZLm1:
      return zlm1::reduce(v);
    case RingId::Zp:
      return v % kPrime;
  }
  return 0;
}

// Two's-complement reading of a Z_{2^64} element.
constexpr int64_t as_signed(uint64_t v) { return static_cast<int64_t>(v); }
constexpr uint64_t from_signed(int64_t v) { return static_cast<uint64_t>(v); }

// 1 iff a + b overflows 2^64 (the "wrap" predicate of share conversion).
constexpr uint64_t wrap(uint64_t a, uint64_t b) { return a + b < a ? 1 : 0; }

}  // namespace triad::ring
