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
#include <span>
#include <string>
#include <vector>

#include "triad/ring/ring.hpp"

namespace triad::ring {

using Shape = std::vector<int64_t>;

int64_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// A shaped, row-major array of canonical ring elements.
//
// Every ring stores 64-bit words in memory; Zp elements are still < 67 and are
// encoded as one byte on the wire.
class RingTensor {
 public:
  RingTensor() = default;
  // Zero tensor.
  RingTensor(RingId ring, Shape shape);
  // Validates length and canonical form.
  RingTensor(RingId ring, Shape shape, std::vector<uint64_t> data);

  static RingTensor scalar(RingId ring, uint64_t v) { return RingTensor(ring, {1}, {v}); }
  static RingTensor from_signed(const Shape& shape, std::span<const int64_t> values);

  RingId ring() const { return ring_; }
  const Shape& shape() const { return shape_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const uint64_t> data() const { return data_; }
  std::span<uint64_t> mutable_data() { return data_; }
  const std::vector<uint64_t>& vec() const { return data_; }

  uint64_t operator[](size_t i) const { return data_[i]; }
  uint64_t& operator[](size_t i) { return data_[i]; }
  int64_t signed_at(size_t i) const { return as_signed(data_[i]); }

  // Same data, new shape with identical element count.
  RingTensor reshaped(Shape shape) const;
  // Elementwise reinterpretation into another ring; every value must already
  // be canonical there.
  RingTensor with_ring(RingId ring) const;

  bool operator==(const RingTensor& o) const = default;

 private:
  RingId ring_ = RingId::ZL;
  Shape shape_;
  std::vector<uint64_t> data_;
};

// Elementwise arithmetic in the operands' ring. Operands must agree on ring
// and shape.
RingTensor operator+(const RingTensor& a, const RingTensor& b);
RingTensor operator-(const RingTensor& a, const RingTensor& b);
RingTensor operator-(const RingTensor& a);
RingTensor hadamard(const RingTensor& a, const RingTensor& b);
RingTensor scale(const RingTensor& a, uint64_t c);
RingTensor& operator+=(RingTensor& a, const RingTensor& b);
RingTensor& operator-=(RingTensor& a, const RingTensor& b);

// [L,M] x [M,N] -> [L,N] in the operands' ring.
RingTensor matmul(const RingTensor& a, const RingTensor& b);

// Arithmetic (sign-propagating) right shift of every ZL element.
RingTensor arithmetic_shift(const RingTensor& a, int bits);

// Canonical wire encoding: little-endian 8-byte words (ZL, ZLm1) or one byte
// per element (Zp).
std::vector<uint8_t> encode(const RingTensor& t);
void encode_into(std::span<const uint64_t> values, RingId ring, std::vector<uint8_t>& out);
RingTensor decode(RingId ring, Shape shape, std::span<const uint8_t> bytes);

}  // namespace triad::ring
