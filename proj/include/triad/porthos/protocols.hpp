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
#include <utility>
#include <vector>

#include "triad/porthos/context.hpp"

// Three-party protocols over additive shares. Unless stated otherwise every
// function is called by all three parties with matching arguments: P0 and P1
// pass their share, P2 passes a placeholder of the right shape and ring (its
// contents are ignored) and receives a zero placeholder back.
namespace triad::porthos {

// Single-channel reshaping for convolution as matrix product.
// reshape_filter: f x f -> f^2 x 1, row-major.
RingTensor reshape_filter(const RingTensor& y);
// reshape_input: m x m -> q^2 x f^2 with Z[i*q + j][k*f + l] = X[k + i][l + j].
RingTensor reshape_input(const RingTensor& x, int64_t f);
// reshape_output: q^2 x 1 -> q x q.
RingTensor reshape_output(const RingTensor& z);

// Zero-communication sharing of a value held by `owner` (P0 or P1): the
// other party's share is drawn from k01. Only the owner's `value` is read.
RingTensor share_private(ProtocolContext& ctx, Role owner, const RingTensor& value);

// P0 and P1 exchange shares and both learn the value.
RingTensor reveal(ProtocolContext& ctx, const RingTensor& share);
// Only `to` (P0 or P1) learns the value; the other returns its own share.
RingTensor reveal_to(ProtocolContext& ctx, Role to, const RingTensor& share);

// P2 holds `count` instances of `per_instance` elements each and hands out a
// fresh 2-out-of-2 sharing. Instance k (global numbering) takes P0's share
// from k0 when k is even and P1's share from k1 when k is odd; P2 sends only
// the complementary share. `values` is read on P2 only.
RingTensor fresh_share(ProtocolContext& ctx, RingId ring, int64_t count, int64_t per_instance,
                       std::span<const uint64_t> values, const std::string& step);

// Shares of `x` with a public constant added (P0 adds it).
RingTensor add_public(ProtocolContext& ctx, const RingTensor& x, uint64_t c);

RingTensor matmul(ProtocolContext& ctx, const RingTensor& x, const RingTensor& y);
// x: H x W x CI, f: FH x FW x CI x CO, VALID padding.
RingTensor conv2d(ProtocolContext& ctx, const RingTensor& x, const RingTensor& f, int64_t sh, int64_t sw);
// Elementwise product over Z_{2^64}.
RingTensor mul(ProtocolContext& ctx, const RingTensor& x, const RingTensor& y);

// Z_{2^64} shares of a -> Z_{2^64-1} shares of a (a = 2^64-1 maps to 0).
RingTensor share_convert(ProtocolContext& ctx, const RingTensor& a);
// Z_{2^64-1} shares of a -> Z_{2^64} shares of bit 63 of a.
RingTensor compute_msb(ProtocolContext& ctx, const RingTensor& a);

// P2 splits the low `width` bits of each x (P2 only) into Z_67 bit shares,
// laid out element-major with bit 0 first.
RingTensor share_bits(ProtocolContext& ctx, std::span<const uint64_t> x, int64_t count, int width,
                      const std::string& step);
// Shares in `out` of beta XOR (x > r) for bit-shared x. r and beta are public
// to P0 and P1 and ignored on P2. P2 learns the result bits.
RingTensor private_compare(ProtocolContext& ctx, const RingTensor& bits, std::span<const uint64_t> r,
                           std::span<const uint8_t> beta, RingId out, int width);

// 1 for a >= 0, 0 for a < 0 (two's complement).
RingTensor drelu(ProtocolContext& ctx, const RingTensor& a);
RingTensor relu(ProtocolContext& ctx, const RingTensor& a);

// cand is W x n; returns the row maxima (W). Ties keep the earlier column.
RingTensor max_rows(ProtocolContext& ctx, const RingTensor& cand);
// Row maxima and the column index attaining them.
std::pair<RingTensor, RingTensor> argmax_rows(ProtocolContext& ctx, const RingTensor& cand);

RingTensor maxpool(ProtocolContext& ctx, const RingTensor& x, int64_t a, int64_t b, int64_t sh,
                   int64_t sw);
// Sum each window, multiply by the public rho_s(1/ab) and truncate by s.
RingTensor avgpool(ProtocolContext& ctx, const RingTensor& x, int64_t a, int64_t b, int64_t sh,
                   int64_t sw, int scale);

// out[..., n] = b[n] * a[..., n] + c[n]; the product lands at scale 2s.
RingTensor fused_batchnorm(ProtocolContext& ctx, const RingTensor& a, const RingTensor& b,
                           const RingTensor& c);

// Share-local arithmetic shift by s; no communication.
RingTensor scaledown(ProtocolContext& ctx, const RingTensor& a, int s);

}  // namespace triad::porthos
