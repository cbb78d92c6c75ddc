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

#include "triad/ring/tensor.hpp"

#include <sstream>

#include "triad/error.hpp"
#include "triad/ring/kernels.hpp"

namespace triad::ring {

std::string_view ring_name(RingId r) {
  switch (r) {
    case RingId::ZL:
      return "Z_2^64";
    case RingId::ZLm1:
      return "Z_2^64-1";
    case RingId::Zp:
      return "Z_67";
  }
  return "?";
}

int64_t numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    TRIAD_ENFORCE(d >= 0, ShapeError, "negative dimension in " + shape_str(shape));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

RingTensor::RingTensor(RingId ring, Shape shape)
    : ring_(ring), shape_(std::move(shape)), data_(static_cast<size_t>(numel(shape_)), 0) {}

RingTensor::RingTensor(RingId ring, Shape shape, std::vector<uint64_t> data)
    : ring_(ring), shape_(std::move(shape)), data_(std::move(data)) {
  TRIAD_ENFORCE(static_cast<int64_t>(data_.size()) == numel(shape_), ShapeError,
                "data length " + std::to_string(data_.size()) + " does not match shape " +
                    shape_str(shape_));
  if (ring_ != RingId::ZL) {
    for (uint64_t v : data_) {
      TRIAD_ENFORCE(is_canonical(ring_, v), FormatError,
                    "non-canonical element for ring " + std::string(ring_name(ring_)));
    }
  }
}

RingTensor RingTensor::from_signed(const Shape& shape, std::span<const int64_t> values) {
  std::vector<uint64_t> d(values.size());
  for (size_t i = 0; i < values.size(); ++i) d[i] = ring::from_signed(values[i]);
  return RingTensor(RingId::ZL, shape, std::move(d));
}

RingTensor RingTensor::reshaped(Shape shape) const {
  TRIAD_ENFORCE(numel(shape) == static_cast<int64_t>(data_.size()), ShapeError,
                "cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  RingTensor t;
  t.ring_ = ring_;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

RingTensor RingTensor::with_ring(RingId ring) const { return RingTensor(ring, shape_, data_); }

namespace {

void check_same(const RingTensor& a, const RingTensor& b, const char* op) {
  TRIAD_ENFORCE(a.ring() == b.ring(), ShapeError, std::string(op) + ": ring mismatch");
  TRIAD_ENFORCE(a.shape() == b.shape(), ShapeError,
                std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                    shape_str(b.shape()));
}

template <class F>
RingTensor zip(const RingTensor& a, const RingTensor& b, F f) {
  RingTensor out(a.ring(), a.shape());
  auto o = out.mutable_data();
  for (size_t i = 0; i < a.size(); ++i) o[i] = f(a[i], b[i]);
  return out;
}

}  // namespace

RingTensor operator+(const RingTensor& a, const RingTensor& b) {
  check_same(a, b, "add");
  if (a.ring() == RingId::ZL) {
    RingTensor out(a.ring(), a.shape());
    kernels::active().add(a.data().data(), b.data().data(), out.mutable_data().data(), a.size());
    return out;
  }
  const RingId r = a.ring();
  return zip(a, b, [r](uint64_t x, uint64_t y) { return add(r, x, y); });
}

RingTensor operator-(const RingTensor& a, const RingTensor& b) {
  check_same(a, b, "sub");
  if (a.ring() == RingId::ZL) {
    RingTensor out(a.ring(), a.shape());
    kernels::active().sub(a.data().data(), b.data().data(), out.mutable_data().data(), a.size());
    return out;
  }
  const RingId r = a.ring();
  return zip(a, b, [r](uint64_t x, uint64_t y) { return sub(r, x, y); });
}

RingTensor operator-(const RingTensor& a) {
  RingTensor out(a.ring(), a.shape());
  auto o = out.mutable_data();
  for (size_t i = 0; i < a.size(); ++i) o[i] = neg(a.ring(), a[i]);
  return out;
}

RingTensor hadamard(const RingTensor& a, const RingTensor& b) {
  check_same(a, b, "hadamard");
  if (a.ring() == RingId::ZL) {
    RingTensor out(a.ring(), a.shape());
    kernels::active().mul(a.data().data(), b.data().data(), out.mutable_data().data(), a.size());
    return out;
  }
  const RingId r = a.ring();
  return zip(a, b, [r](uint64_t x, uint64_t y) { return mul(r, x, y); });
}

RingTensor scale(const RingTensor& a, uint64_t c) {
  RingTensor out(a.ring(), a.shape());
  if (a.ring() == RingId::ZL) {
    kernels::active().scale(a.data().data(), c, out.mutable_data().data(), a.size());
    return out;
  }
  const uint64_t cc = from_uint(a.ring(), c);
  auto o = out.mutable_data();
  for (size_t i = 0; i < a.size(); ++i) o[i] = mul(a.ring(), a[i], cc);
  return out;
}

RingTensor& operator+=(RingTensor& a, const RingTensor& b) {
  check_same(a, b, "add");
  auto o = a.mutable_data();
  if (a.ring() == RingId::ZL) {
    kernels::active().add(o.data(), b.data().data(), o.data(), a.size());
  } else {
    for (size_t i = 0; i < a.size(); ++i) o[i] = add(a.ring(), o[i], b[i]);
  }
  return a;
}

RingTensor& operator-=(RingTensor& a, const RingTensor& b) {
  check_same(a, b, "sub");
  auto o = a.mutable_data();
  if (a.ring() == RingId::ZL) {
    kernels::active().sub(o.data(), b.data().data(), o.data(), a.size());
  } else {
    for (size_t i = 0; i < a.size(); ++i) o[i] = sub(a.ring(), o[i], b[i]);
  }
  return a;
}

RingTensor matmul(const RingTensor& a, const RingTensor& b) {
  TRIAD_ENFORCE(a.ring() == b.ring(), ShapeError, "matmul: ring mismatch");
  TRIAD_ENFORCE(a.shape().size() == 2 && b.shape().size() == 2, ShapeError,
                "matmul: operands must be rank 2");
  const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  TRIAD_ENFORCE(b.shape()[0] == k, ShapeError,
                "matmul: inner dimension mismatch " + shape_str(a.shape()) + " x " +
                    shape_str(b.shape()));
  RingTensor out(a.ring(), {m, n});
  if (a.ring() == RingId::ZL) {
    kernels::active().matmul(a.data().data(), b.data().data(), out.mutable_data().data(),
                             static_cast<size_t>(m), static_cast<size_t>(k),
                             static_cast<size_t>(n));
    return out;
  }
  const RingId r = a.ring();
  auto o = out.mutable_data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      const uint64_t av = a[static_cast<size_t>(i * k + p)];
      for (int64_t j = 0; j < n; ++j) {
        uint64_t& dst = o[static_cast<size_t>(i * n + j)];
        dst = add(r, dst, mul(r, av, b[static_cast<size_t>(p * n + j)]));
      }
    }
  }
  return out;
}

RingTensor arithmetic_shift(const RingTensor& a, int bits) {
  TRIAD_ENFORCE(a.ring() == RingId::ZL, ShapeError, "arithmetic_shift needs Z_2^64");
  TRIAD_ENFORCE(bits >= 0 && bits < 64, ShapeError, "shift out of range");
  RingTensor out(a.ring(), a.shape());
  kernels::active().ashr(a.data().data(), bits, out.mutable_data().data(), a.size());
  return out;
}

void encode_into(std::span<const uint64_t> values, RingId ring, std::vector<uint8_t>& out) {
  const size_t w = wire_bytes(ring);
  const size_t base = out.size();
  out.resize(base + values.size() * w);
  uint8_t* p = out.data() + base;
  if (w == 1) {
    for (size_t i = 0; i < values.size(); ++i) p[i] = static_cast<uint8_t>(values[i]);
    return;
  }
  for (size_t i = 0; i < values.size(); ++i) {
    uint64_t v = values[i];
    for (int b = 0; b < 8; ++b) p[i * 8 + b] = static_cast<uint8_t>(v >> (8 * b));
  }
}

std::vector<uint8_t> encode(const RingTensor& t) {
  std::vector<uint8_t> out;
  encode_into(t.data(), t.ring(), out);
  return out;
}

RingTensor decode(RingId ring, Shape shape, std::span<const uint8_t> bytes) {
  const size_t n = static_cast<size_t>(numel(shape));
  const size_t w = wire_bytes(ring);
  TRIAD_ENFORCE(bytes.size() == n * w, FormatError,
                "wire payload of " + std::to_string(bytes.size()) + " bytes for " +
                    std::to_string(n) + " elements");
  std::vector<uint64_t> d(n);
  if (w == 1) {
    for (size_t i = 0; i < n; ++i) d[i] = bytes[i];
  } else {
    for (size_t i = 0; i < n; ++i) {
      uint64_t v = 0;
      for (int b = 0; b < 8; ++b) v |= static_cast<uint64_t>(bytes[i * 8 + b]) << (8 * b);
      d[i] = v;
    }
  }
  return RingTensor(ring, std::move(shape), std::move(d));
}

}  // namespace triad::ring
