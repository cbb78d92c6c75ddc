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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <random>

#include "triad/error.hpp"
#include "triad/fixedpoint/fixed.hpp"
#include "triad/harness/local.hpp"
#include "triad/ir/model.hpp"
#include "triad/porthos/backend.hpp"
#include "triad/porthos/protocols.hpp"
#include "triad/ring/share.hpp"

namespace triad::porthos {
namespace {

using harness::LocalSession;
using ring::reconstruct;

constexpr uint64_t kAllOnes = ~uint64_t{0};

uint64_t random_elem(RingId r, std::mt19937_64& g) {
  for (;;) {
    uint64_t v = g();
    if (r == RingId::Zp) return v % ring::kPrime;
    if (ring::is_canonical(r, v)) return v;
  }
}

struct Dealt {
  RingTensor p0, p1;
};

Dealt deal(const RingTensor& v, std::mt19937_64& g) {
  std::vector<uint64_t> m(v.size());
  for (auto& x : m) x = random_elem(v.ring(), g);
  RingTensor mask(v.ring(), v.shape(), m);
  return {v - mask, mask};
}

RingTensor pick(const ProtocolContext& ctx, const Dealt& d) {
  switch (ctx.role()) {
    case Role::P0:
      return d.p0;
    case Role::P1:
      return d.p1;
    case Role::P2:
      break;
  }
  return RingTensor(d.p0.ring(), d.p0.shape());
}

template <class F>
RingTensor run3(LocalSession& s, F f) {
  std::array<RingTensor, 3> out;
  s.run([&](ProtocolContext& ctx) { out[static_cast<size_t>(ctx.role())] = f(ctx); });
  return reconstruct(out[0], out[1]);
}

RingTensor zl(Shape s, std::vector<uint64_t> v) { return RingTensor(RingId::ZL, std::move(s), std::move(v)); }

RingTensor signed_vec(const std::vector<int64_t>& v) {
  return RingTensor::from_signed({static_cast<int64_t>(v.size())}, v);
}

// Edge-biased signed values with |a| < 2^61.
std::vector<int64_t> signed_sample(std::mt19937_64& g, size_t n) {
  std::vector<int64_t> v(n);
  const int64_t edges[] = {0, 1, -1, 2, -2, (int64_t{1} << 61) - 1, -(int64_t{1} << 61) + 1};
  for (size_t i = 0; i < n; ++i) {
    switch (g() % 4) {
      case 0:
        v[i] = edges[g() % 7];
        break;
      case 1:
        v[i] = static_cast<int64_t>(g() % 2001) - 1000;
        break;
      default:
        v[i] = static_cast<int64_t>(g()) >> 3;
    }
  }
  return v;
}

// --- reshaping ---------------------------------------------------------------

TEST(Reshape, Filter) {
  EXPECT_EQ(reshape_filter(zl({2, 2}, {1, 2, 3, 4})), zl({4, 1}, {1, 2, 3, 4}));
  EXPECT_EQ(reshape_filter(zl({1, 1}, {9})), zl({1, 1}, {9}));
  EXPECT_EQ(reshape_filter(zl({3, 3}, {0, 1, 2, 3, 4, 5, 6, 7, 8})),
            zl({9, 1}, {0, 1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(Reshape, InputMatchesDisplayedMatrix) {
  RingTensor x = zl({3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_EQ(reshape_input(x, 2),
            zl({4, 4}, {1, 2, 4, 5, 2, 3, 5, 6, 4, 5, 7, 8, 5, 6, 8, 9}));
  EXPECT_EQ(reshape_input(x, 3), zl({1, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_THROW(reshape_input(x, 4), ShapeError);
}

TEST(Reshape, Output) {
  EXPECT_EQ(reshape_output(zl({4, 1}, {1, 2, 3, 4})), zl({2, 2}, {1, 2, 3, 4}));
  EXPECT_THROW(reshape_output(zl({3, 1}, {1, 2, 3})), ShapeError);
}

TEST(Reshape, ComposesToSlidingWindow) {
  std::mt19937_64 g(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<uint64_t> xv(36), yv(9);
    for (auto& v : xv) v = g() % 1000;
    for (auto& v : yv) v = g() % 1000;
    RingTensor x = zl({6, 6}, xv), y = zl({3, 3}, yv);
    RingTensor got = reshape_output(ring::matmul(reshape_input(x, 3), reshape_filter(y)));
    std::vector<uint64_t> want(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) want[i * 4 + j] += xv[(i + k) * 6 + j + l] * yv[k * 3 + l];
    EXPECT_EQ(got, zl({4, 4}, want));
  }
}

// --- sharing and linear protocols -------------------------------------------

TEST(Sharing, PrivateInputsAreFree) {
  LocalSession s("share");
  RingTensor w = signed_vec({5, -7, 1 << 20});
  RingTensor out = run3(s, [&](ProtocolContext& ctx) {
    auto a = share_private(ctx, Role::P0, ctx.role() == Role::P0 ? w : RingTensor(RingId::ZL, {3}));
    auto b = share_private(ctx, Role::P1, ctx.role() == Role::P1 ? w : RingTensor(RingId::ZL, {3}));
    return a + b;
  });
  EXPECT_EQ(out, w + w);
  EXPECT_EQ(s.payload_total(), 0);
}

TEST(Sharing, RevealAndPublicAdd) {
  LocalSession s("reveal");
  std::mt19937_64 g(2);
  RingTensor v = signed_vec({-3, 0, 99});
  Dealt d = deal(v, g);
  std::array<RingTensor, 3> seen;
  s.run([&](ProtocolContext& ctx) {
    seen[static_cast<size_t>(ctx.role())] = reveal(ctx, add_public(ctx, pick(ctx, d), 10));
  });
  EXPECT_EQ(seen[0], signed_vec({7, 10, 109}));
  EXPECT_EQ(seen[1], seen[0]);
  EXPECT_EQ(s.payload_total(), 2 * 3 * 8);
}

TEST(MatMul, Scalar) {
  LocalSession s("mm1");
  std::mt19937_64 g(3);
  Dealt a = deal(zl({1, 1}, {3}), g), b = deal(zl({1, 1}, {5}), g);
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return matmul(ctx, pick(ctx, a), pick(ctx, b)); }),
            zl({1, 1}, {15}));
}

TEST(MatMul, IdentityAndRandom) {
  LocalSession s("mm2");
  std::mt19937_64 g(4);
  std::vector<uint64_t> iv(16, 0);
  for (int i = 0; i < 4; ++i) iv[i * 5] = 1;
  std::vector<Dealt> as, bs;
  std::vector<RingTensor> want;
  for (int t = 0; t < 1000; ++t) {
    std::vector<uint64_t> av(16), bv(16);
    for (auto& v : av) v = g();
    for (auto& v : bv) v = g();
    RingTensor A = zl({4, 4}, av), B = t == 0 ? zl({4, 4}, iv) : zl({4, 4}, bv);
    as.push_back(deal(A, g));
    bs.push_back(deal(B, g));
    want.push_back(ring::matmul(A, B));
  }
  EXPECT_EQ(want[0].vec(), (as[0].p0 + as[0].p1).vec());
  std::array<std::vector<RingTensor>, 3> outs;
  s.run([&](ProtocolContext& ctx) {
    for (size_t t = 0; t < as.size(); ++t) {
      outs[static_cast<size_t>(ctx.role())].push_back(matmul(ctx, pick(ctx, as[t]), pick(ctx, bs[t])));
    }
  });
  int fails = 0;
  for (size_t t = 0; t < as.size(); ++t) fails += reconstruct(outs[0][t], outs[1][t]) == want[t] ? 0 : 1;
  EXPECT_EQ(fails, 0);
  // C1: LN, E and F both ways: 2(LM + MN).
  EXPECT_EQ(s.payload_total(), 1000 * (16 + 2 * (16 + 16)) * 8);
}

TEST(MatMul, ShapeMismatch) {
  LocalSession s("mm3", std::chrono::milliseconds(500));
  EXPECT_THROW(s.run([&](ProtocolContext& ctx) {
                 matmul(ctx, RingTensor(RingId::ZL, {2, 3}), RingTensor(RingId::ZL, {2, 3}));
               }),
               ShapeError);
}

int64_t conv_formula_bytes(int64_t m, int64_t f, int64_t i, int64_t o) {
  const int64_t q = m - f + 1;
  return (2 * m * m * i + 2 * f * f * o * i + q * q * o) * 8;
}

RingTensor random_tensor(Shape s, std::mt19937_64& g, uint64_t mod = 0) {
  std::vector<uint64_t> v(static_cast<size_t>(ring::numel(s)));
  for (auto& x : v) x = mod ? g() % mod : g();
  return RingTensor(RingId::ZL, std::move(s), std::move(v));
}

TEST(Conv2d, IdentityFilterCrops) {
  LocalSession s("cv0");
  std::mt19937_64 g(5);
  RingTensor x = random_tensor({4, 4, 1}, g);
  Dealt dx = deal(x, g), df = deal(zl({1, 1, 1, 1}, {1}), g);
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return conv2d(ctx, pick(ctx, dx), pick(ctx, df), 1, 1); }),
            x);
}

TEST(Conv2d, SmallExample) {
  LocalSession s("cv1");
  std::mt19937_64 g(6);
  Dealt dx = deal(zl({3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9}), g);
  Dealt df = deal(zl({2, 2, 1, 1}, {1, 2, 3, 4}), g);
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return conv2d(ctx, pick(ctx, dx), pick(ctx, df), 1, 1); }),
            zl({2, 2, 1}, {37, 47, 67, 77}));
}

TEST(Conv2d, MeteredTrafficMatchesFormula) {
  for (auto [m, f, i, o] : std::vector<std::array<int64_t, 4>>{{5, 2, 1, 1}, {8, 3, 1, 1}, {8, 3, 2, 4}}) {
    LocalSession s("cv2");
    std::mt19937_64 g(7);
    RingTensor x = random_tensor({m, m, i}, g), y = random_tensor({f, f, i, o}, g);
    Dealt dx = deal(x, g), dy = deal(y, g);
    RingTensor got = run3(s, [&](ProtocolContext& ctx) {
      ProtocolContext::Scope sc(ctx, "Conv2d");
      return conv2d(ctx, pick(ctx, dx), pick(ctx, dy), 1, 1);
    });
    EXPECT_EQ(got, fixedpoint::conv_plain(x, y, 1, 1));
    EXPECT_EQ(s.payload_total(), conv_formula_bytes(m, f, i, o)) << m << "," << f << "," << i << "," << o;
    int64_t attributed = 0;
    for (Role r : {Role::P0, Role::P1, Role::P2}) attributed += s.ctx(r).bytes_by_protocol().at("Conv2d");
    EXPECT_EQ(attributed, s.payload_total());
  }
  EXPECT_EQ(conv_formula_bytes(5, 2, 1, 1), 592);
}

TEST(Conv2d, RandomStridedAgainstPlaintext) {
  LocalSession s("cv3");
  std::mt19937_64 g(8);
  std::array<std::vector<RingTensor>, 3> outs;
  std::vector<RingTensor> want;
  std::vector<std::array<int64_t, 2>> strides;
  std::vector<Dealt> xs, fs;
  for (int t = 0; t < 200; ++t) {
    const int64_t h = 3 + static_cast<int64_t>(g() % 6), w = 3 + static_cast<int64_t>(g() % 6);
    const int64_t fh = 1 + static_cast<int64_t>(g() % 3), fw = 1 + static_cast<int64_t>(g() % 3);
    const int64_t ci = 1 + static_cast<int64_t>(g() % 3), co = 1 + static_cast<int64_t>(g() % 3);
    const int64_t sh = 1 + static_cast<int64_t>(g() % 2), sw = 1 + static_cast<int64_t>(g() % 2);
    RingTensor x = random_tensor({h, w, ci}, g), f = random_tensor({fh, fw, ci, co}, g);
    xs.push_back(deal(x, g));
    fs.push_back(deal(f, g));
    strides.push_back({sh, sw});
    want.push_back(fixedpoint::conv_plain(x, f, sh, sw));
  }
  s.run([&](ProtocolContext& ctx) {
    for (size_t t = 0; t < xs.size(); ++t) {
      outs[static_cast<size_t>(ctx.role())].push_back(
          conv2d(ctx, pick(ctx, xs[t]), pick(ctx, fs[t]), strides[t][0], strides[t][1]));
    }
  });
  int fails = 0;
  for (size_t t = 0; t < want.size(); ++t) fails += reconstruct(outs[0][t], outs[1][t]) == want[t] ? 0 : 1;
  EXPECT_EQ(fails, 0);
}

TEST(Mul, ElementwiseRandom) {
  LocalSession s("mul");
  std::mt19937_64 g(9);
  RingTensor x = random_tensor({10000}, g), y = random_tensor({10000}, g);
  Dealt dx = deal(x, g), dy = deal(y, g);
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return mul(ctx, pick(ctx, dx), pick(ctx, dy)); }),
            ring::hadamard(x, y));
  EXPECT_EQ(s.payload_total(), 10000 * 5 * 8);
}

// --- share conversion and MSB -------------------------------------------------

TEST(ShareConvert, Examples) {
  LocalSession s("sc1");
  std::mt19937_64 g(10);
  Dealt d = deal(zl({4}, {0, kAllOnes - 1, 12345, kAllOnes}), g);
  RingTensor out = run3(s, [&](ProtocolContext& ctx) { return share_convert(ctx, pick(ctx, d)); });
  EXPECT_EQ(out.ring(), RingId::ZLm1);
  EXPECT_EQ(out.vec(), (std::vector<uint64_t>{0, kAllOnes - 1, 12345, 0}));
}

TEST(ShareConvert, RandomRoundTripAndBudget) {
  LocalSession s("sc2");
  std::mt19937_64 g(11);
  const size_t n = 10000;
  std::vector<uint64_t> v(n);
  for (auto& x : v) x = g();
  v[0] = 0;
  v[1] = kAllOnes - 1;
  Dealt d = deal(zl({static_cast<int64_t>(n)}, v), g);
  RingTensor out = run3(s, [&](ProtocolContext& ctx) { return share_convert(ctx, pick(ctx, d)); });
  int fails = 0;
  for (size_t i = 0; i < n; ++i) fails += out[i] == ring::zlm1::reduce(v[i]) ? 0 : 1;
  EXPECT_EQ(fails, 0);
  // 3*l*log p + 4*l bits per element: 192 + 32 bytes.
  EXPECT_EQ(s.payload_total(), static_cast<int64_t>(n) * 224);
}

TEST(ComputeMsb, ExamplesAndRandom) {
  LocalSession s("msb");
  std::mt19937_64 g(12);
  const size_t n = 10000;
  std::vector<uint64_t> v(n);
  for (auto& x : v) x = random_elem(RingId::ZLm1, g);
  v[0] = 1;
  v[1] = uint64_t{1} << 63;
  v[2] = 0;
  v[3] = kAllOnes - 1;
  v[4] = (uint64_t{1} << 63) - 1;
  Dealt d = deal(RingTensor(RingId::ZLm1, {static_cast<int64_t>(n)}, v), g);
  RingTensor out = run3(s, [&](ProtocolContext& ctx) { return compute_msb(ctx, pick(ctx, d)); });
  EXPECT_EQ(out.ring(), RingId::ZL);
  EXPECT_EQ(out[0], 0u);
  EXPECT_EQ(out[1], 1u);
  int fails = 0;
  for (size_t i = 0; i < n; ++i) fails += out[i] == (v[i] >> 63) ? 0 : 1;
  EXPECT_EQ(fails, 0);
  // 3*l*log p + 10*l bits per element.
  EXPECT_EQ(s.payload_total(), static_cast<int64_t>(n) * 272);
}

// --- private compare ----------------------------------------------------------

RingTensor run_pc(LocalSession& s, const std::vector<uint64_t>& x, const std::vector<uint64_t>& r,
                  const std::vector<uint8_t>& beta, int width) {
  return run3(s, [&](ProtocolContext& ctx) {
    const bool p2 = ctx.is_p2();
    auto bits = share_bits(ctx, p2 ? std::span<const uint64_t>(x) : std::span<const uint64_t>(),
                           static_cast<int64_t>(x.size()), width, "test/bits");
    return private_compare(ctx, bits, p2 ? std::span<const uint64_t>() : std::span<const uint64_t>(r),
                           p2 ? std::span<const uint8_t>() : std::span<const uint8_t>(beta), RingId::ZL,
                           width);
  });
}

TEST(PrivateCompare, Examples) {
  LocalSession s("pc1");
  RingTensor out = run_pc(s, {5, 3, 3, 7, 0}, {3, 3, 3, 255, 255}, {0, 0, 1, 1, 1}, 8);
  // 5 > 3; 3 > 3 is false; 1 xor false; r = 2^8 - 1 with beta = 1.
  EXPECT_EQ(out.vec(), (std::vector<uint64_t>{1, 0, 1, 1, 1}));
}

TEST(PrivateCompare, Exhaustive8Bit) {
  LocalSession s("pc2");
  std::vector<uint64_t> x, r;
  std::vector<uint8_t> beta;
  for (uint64_t a = 0; a < 256; ++a)
    for (uint64_t b = 0; b < 256; ++b)
      for (uint8_t bt = 0; bt < 2; ++bt) {
        x.push_back(a);
        r.push_back(b);
        beta.push_back(bt);
      }
  RingTensor out = run_pc(s, x, r, beta, 8);
  int fails = 0;
  for (size_t i = 0; i < x.size(); ++i) fails += out[i] == (beta[i] ^ (x[i] > r[i] ? 1u : 0u)) ? 0 : 1;
  EXPECT_EQ(fails, 0);
}

TEST(PrivateCompare, RandomFullWidth) {
  LocalSession s("pc3");
  std::mt19937_64 g(13);
  const size_t n = 10000;
  std::vector<uint64_t> x(n), r(n);
  std::vector<uint8_t> beta(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = g();
    r[i] = g() % 8 == 0 ? x[i] : g();
    if (g() % 16 == 0) r[i] = kAllOnes;
    beta[i] = static_cast<uint8_t>(g() & 1);
  }
  RingTensor out = run_pc(s, x, r, beta, 64);
  int fails = 0;
  for (size_t i = 0; i < n; ++i) fails += out[i] == (beta[i] ^ (x[i] > r[i] ? 1u : 0u)) ? 0 : 1;
  EXPECT_EQ(fails, 0);
}

TEST(PrivateCompare, RejectsWrongRing) {
  LocalSession s("pc4", std::chrono::milliseconds(500));
  std::vector<uint64_t> r{1};
  std::vector<uint8_t> b{0};
  EXPECT_THROW(s.run([&](ProtocolContext& ctx) {
                 private_compare(ctx, RingTensor(RingId::ZL, {8}), r, b, RingId::ZL, 8);
               }),
               FormatError);
}

// --- DReLU / ReLU ---------------------------------------------------------------

TEST(Relu, Examples) {
  LocalSession s("relu1");
  std::mt19937_64 g(14);
  RingTensor a = signed_vec({ring::as_signed(fixedpoint::rho(-1.5f, 12)), 7, 0, -1});
  Dealt d = deal(a, g);
  RingTensor dr = run3(s, [&](ProtocolContext& ctx) { return drelu(ctx, pick(ctx, d)); });
  RingTensor rl = run3(s, [&](ProtocolContext& ctx) { return relu(ctx, pick(ctx, d)); });
  EXPECT_EQ(dr.vec(), (std::vector<uint64_t>{0, 1, 1, 0}));
  EXPECT_EQ(rl, signed_vec({0, 7, 0, 0}));
}

TEST(Relu, RandomAgainstOracle) {
  LocalSession s("relu2");
  std::mt19937_64 g(15);
  auto v = signed_sample(g, 10000);
  Dealt d = deal(signed_vec(v), g);
  RingTensor dr = run3(s, [&](ProtocolContext& ctx) { return drelu(ctx, pick(ctx, d)); });
  EXPECT_EQ(s.payload_total(), 10000 * 496);
  s.clear_stats();
  RingTensor rl = run3(s, [&](ProtocolContext& ctx) { return relu(ctx, pick(ctx, d)); });
  int fails = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    fails += dr[i] == (v[i] >= 0 ? 1u : 0u) ? 0 : 1;
    fails += rl.signed_at(i) == std::max<int64_t>(v[i], 0) ? 0 : 1;
  }
  EXPECT_EQ(fails, 0);
  // 6*l*log p + 19*l bits = 536 bytes per ReLU.
  EXPECT_EQ(s.payload_total(), 10000 * 536);
  EXPECT_EQ(s.ctx(Role::P0).ops().relu, 10000);
}

void expect_balanced(ProtocolContext& p2, int64_t n) {
  ASSERT_FALSE(p2.fresh_log().empty());
  for (const auto& rec : p2.fresh_log()) {
    EXPECT_EQ(rec.to_p0 + rec.to_p1, n) << rec.step;
    EXPECT_EQ(std::max(rec.to_p0, rec.to_p1), (n + 1) / 2) << rec.step;
    EXPECT_EQ(std::min(rec.to_p0, rec.to_p1), n / 2) << rec.step;
  }
}

TEST(Relu, FreshSharesAreLoadBalanced) {
  for (int64_t n : {1000, 999, 1}) {
    LocalSession s("relu3");
    std::mt19937_64 g(16);
    Dealt d = deal(signed_vec(signed_sample(g, static_cast<size_t>(n))), g);
    run3(s, [&](ProtocolContext& ctx) { return relu(ctx, pick(ctx, d)); });
    expect_balanced(s.ctx(Role::P2), n);
  }
}

// --- pooling and argmax ---------------------------------------------------------

TEST(MaxPool, Examples) {
  LocalSession s("mp1");
  std::mt19937_64 g(17);
  Dealt one = deal(signed_vec({42}).reshaped({1, 1}), g);
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return max_rows(ctx, pick(ctx, one)); }), signed_vec({42}));
  EXPECT_EQ(s.payload_total(), 0);

  Dealt list = deal(signed_vec({3, 1, 4, 1, 5}).reshaped({1, 5}), g);
  std::array<RingTensor, 3> mx, ix;
  s.run([&](ProtocolContext& ctx) {
    auto [m, i] = argmax_rows(ctx, pick(ctx, list));
    mx[static_cast<size_t>(ctx.role())] = m;
    ix[static_cast<size_t>(ctx.role())] = i;
  });
  EXPECT_EQ(reconstruct(mx[0], mx[1]), signed_vec({5}));
  EXPECT_EQ(reconstruct(ix[0], ix[1]), signed_vec({4}));

  Dealt ties = deal(signed_vec({2, 5, 5, -1}).reshaped({1, 4}), g);
  s.run([&](ProtocolContext& ctx) {
    auto [m, i] = argmax_rows(ctx, pick(ctx, ties));
    ix[static_cast<size_t>(ctx.role())] = i;
  });
  EXPECT_EQ(reconstruct(ix[0], ix[1]), signed_vec({1}));
}

TEST(MaxPool, RandomListsAndBudget) {
  LocalSession s("mp2");
  std::mt19937_64 g(18);
  int fails = 0;
  for (int64_t n = 1; n <= 16; ++n) {
    const int64_t rows = 64;
    auto v = signed_sample(g, static_cast<size_t>(rows * n));
    Dealt d = deal(signed_vec(v).reshaped({rows, n}), g);
    s.clear_stats();
    std::array<RingTensor, 3> mx, ix, mo;
    s.run([&](ProtocolContext& ctx) {
      auto [m, i] = argmax_rows(ctx, pick(ctx, d));
      mx[static_cast<size_t>(ctx.role())] = m;
      ix[static_cast<size_t>(ctx.role())] = i;
    });
    // (6*l*log p + 24*l)(n - 1) bits per row.
    EXPECT_EQ(s.payload_total(), rows * (n - 1) * 576);
    s.clear_stats();
    s.run([&](ProtocolContext& ctx) { mo[static_cast<size_t>(ctx.role())] = max_rows(ctx, pick(ctx, d)); });
    EXPECT_EQ(s.payload_total(), rows * (n - 1) * 536);
    EXPECT_EQ(s.ctx(Role::P0).ops().comparisons, rows * (n - 1));
    RingTensor m = reconstruct(mx[0], mx[1]), i = reconstruct(ix[0], ix[1]), m2 = reconstruct(mo[0], mo[1]);
    for (int64_t r = 0; r < rows; ++r) {
      auto first = v.begin() + r * n;
      auto it = std::max_element(first, first + n);
      fails += m.signed_at(static_cast<size_t>(r)) == *it ? 0 : 1;
      fails += m2.signed_at(static_cast<size_t>(r)) == *it ? 0 : 1;
      fails += i.signed_at(static_cast<size_t>(r)) == it - first ? 0 : 1;
    }
  }
  EXPECT_EQ(fails, 0);
}

TEST(MaxPool, LayerMatchesPlaintextAndCommutesWithRelu) {
  LocalSession s("mp3");
  std::mt19937_64 g(19);
  auto v = signed_sample(g, 8 * 8 * 3);
  RingTensor x = signed_vec(v).reshaped({8, 8, 3});
  Dealt d = deal(x, g);
  fixedpoint::FixedModel dummy;
  fixedpoint::PlainBackend plain(dummy, x);
  ir::Attrs at;
  at.pool = {2, 2};
  RingTensor a = run3(s, [&](ProtocolContext& ctx) { return relu(ctx, maxpool(ctx, pick(ctx, d), 2, 2, 2, 2)); });
  RingTensor b = run3(s, [&](ProtocolContext& ctx) { return maxpool(ctx, relu(ctx, pick(ctx, d)), 2, 2, 2, 2); });
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, plain.relu(plain.maxpool(x, at)));
}

TEST(AvgPool, WithinOneOfPlaintext) {
  LocalSession s("ap");
  std::mt19937_64 g(20);
  std::vector<int64_t> v(6 * 6 * 2);
  for (auto& e : v) e = static_cast<int64_t>(g() % 200001) - 100000;
  RingTensor x = signed_vec(v).reshaped({6, 6, 2});
  Dealt d = deal(x, g);
  fixedpoint::FixedModel dummy;
  fixedpoint::PlainBackend plain(dummy, x);
  ir::Attrs at;
  at.pool = {3, 3};
  RingTensor want = plain.avgpool(x, at, 12);
  RingTensor got = run3(s, [&](ProtocolContext& ctx) { return avgpool(ctx, pick(ctx, d), 3, 3, 3, 3, 12); });
  ASSERT_EQ(got.shape(), want.shape());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_LE(std::abs(got.signed_at(i) - want.signed_at(i)), 1);
  EXPECT_EQ(s.payload_total(), 0);
}

// --- batch norm and truncation --------------------------------------------------

TEST(FusedBatchNorm, Examples) {
  LocalSession s("fbn");
  std::mt19937_64 g(21);
  const int sc = 10;
  auto v = signed_sample(g, 4 * 4 * 3);
  for (auto& e : v) e >>= 20;
  RingTensor a = signed_vec(v).reshaped({4, 4, 3});
  Dealt da = deal(a, g);
  Dealt one = deal(zl({3}, {1u << sc, 1u << sc, 1u << sc}), g), zero = deal(zl({3}, {0, 0, 0}), g);
  RingTensor id = run3(s, [&](ProtocolContext& ctx) {
    return scaledown(ctx, fused_batchnorm(ctx, pick(ctx, da), pick(ctx, one), pick(ctx, zero)), sc);
  });
  for (size_t i = 0; i < a.size(); ++i) {
    const int64_t diff = id.signed_at(i) - a.signed_at(i);
    EXPECT_TRUE(diff == 0 || diff == -1) << diff;
  }
  RingTensor cv = signed_vec({5, -6, 7});
  Dealt dc = deal(cv, g);
  RingTensor bc = run3(s, [&](ProtocolContext& ctx) {
    return fused_batchnorm(ctx, pick(ctx, da), pick(ctx, zero), pick(ctx, dc));
  });
  for (size_t i = 0; i < bc.size(); ++i) EXPECT_EQ(bc[i], cv[i % 3]);

  RingTensor b = random_tensor({3}, g), c = random_tensor({3}, g);
  Dealt db = deal(b, g), dc2 = deal(c, g);
  RingTensor got = run3(s, [&](ProtocolContext& ctx) {
    return fused_batchnorm(ctx, pick(ctx, da), pick(ctx, db), pick(ctx, dc2));
  });
  fixedpoint::FixedModel dummy;
  fixedpoint::PlainBackend plain(dummy, a);
  EXPECT_EQ(got, plain.fused_batchnorm(a, b, c));
}

TEST(ScaleDown, Examples) {
  LocalSession s("sd1");
  const int sc = 12;
  Dealt exact{zl({1}, {1u << sc}), zl({1}, {0})};
  EXPECT_EQ(run3(s, [&](ProtocolContext& ctx) { return scaledown(ctx, pick(ctx, exact), sc); }), zl({1}, {1}));
  std::mt19937_64 g(22);
  for (int t = 0; t < 1000; ++t) {
    uint64_t r = g();
    Dealt z{zl({1}, {r}), zl({1}, {0 - r})};
    RingTensor out = run3(s, [&](ProtocolContext& ctx) { return scaledown(ctx, pick(ctx, z), sc); });
    EXPECT_LE(std::abs(out.signed_at(0)), 1);
  }
  EXPECT_EQ(s.payload_total(), 0);
}

TEST(ScaleDown, BoundedValuesWithinOne) {
  LocalSession s("sd2");
  std::mt19937_64 g(23);
  const size_t n = 100000;
  std::vector<int64_t> v(n);
  for (auto& e : v) e = static_cast<int64_t>(g() % (uint64_t{1} << 41)) - (int64_t{1} << 40) + 1;
  Dealt d = deal(signed_vec(v), g);
  int fails = 0;
  for (int sc : {1, 8, 13, 24}) {
    RingTensor out = run3(s, [&](ProtocolContext& ctx) { return scaledown(ctx, pick(ctx, d), sc); });
    for (size_t i = 0; i < n; ++i) {
      const int64_t want = v[i] >> sc;
      fails += std::abs(out.signed_at(i) - want) <= 1 ? 0 : 1;
    }
  }
  EXPECT_EQ(fails, 0);
  EXPECT_EQ(s.ctx(Role::P0).ops().scaledown_elems, static_cast<int64_t>(4 * n));
}

// --- determinism and wire checks --------------------------------------------------

TEST(Determinism, SameSeedSameShares) {
  std::mt19937_64 g(24);
  Dealt d = deal(signed_vec(signed_sample(g, 300)), g);
  std::array<RingTensor, 3> first, second;
  for (auto* out : {&first, &second}) {
    LocalSession s("det");
    s.run([&](ProtocolContext& ctx) { (*out)[static_cast<size_t>(ctx.role())] = relu(ctx, pick(ctx, d)); });
  }
  EXPECT_EQ(first, second);
}

TEST(Wire, MalformedPayloadRejected) {
  LocalSession s("wire", std::chrono::milliseconds(500));
  EXPECT_THROW(s.run([&](ProtocolContext& ctx) {
                 if (ctx.role() == Role::P0) {
                   std::vector<uint8_t> bad(7, 0);
                   ctx.channel(Role::P1).send(ring_tag(RingId::ZL), bad);
                 } else if (ctx.role() == Role::P1) {
                   ctx.recv(Role::P0, RingId::ZL, 1);
                 }
               }),
               FormatError);
  LocalSession s2("wire2", std::chrono::milliseconds(500));
  EXPECT_THROW(s2.run([&](ProtocolContext& ctx) {
                 if (ctx.role() == Role::P0) {
                   std::vector<uint8_t> bad{200};
                   ctx.channel(Role::P1).send(ring_tag(RingId::Zp), bad);
                 } else if (ctx.role() == Role::P1) {
                   ctx.recv(Role::P0, RingId::Zp, 1);
                 }
               }),
               FormatError);
}

// --- whole programs -------------------------------------------------------------

ir::FloatModel small_cnn(std::mt19937_64& g, bool with_argmax) {
  using ir::Call;
  using ir::DeclKind;
  using ir::OpKind;
  ir::HLILProgram p;
  p.input = "x";
  p.output = with_argmax ? "y" : "logits";
  p.add_decl({"x", {8, 8, 2}, DeclKind::Input});
  p.add_decl({"f", {3, 3, 2, 4}, DeclKind::Param});
  for (const char* n : {"g", "be", "mu", "va"}) p.add_decl({n, {4}, DeclKind::Param});
  p.add_decl({"W", {64, 5}, DeclKind::Param});
  p.add_decl({"b", {5}, DeclKind::Param});
  Call conv{OpKind::Conv, {"x", "f"}, "c", {}};
  conv.attrs.padding = "SAME";
  p.calls.push_back(conv);
  p.calls.push_back({OpKind::BatchNorm, {"c", "g", "be", "mu", "va"}, "n", {}});
  p.calls.push_back({OpKind::ReLU, {"n"}, "r", {}});
  Call mp{OpKind::MaxPool, {"r"}, "m", {}};
  mp.attrs.pool = {2, 2};
  p.calls.push_back(mp);
  Call rs{OpKind::Reshape, {"m"}, "flat", {}};
  rs.attrs.shape = {1, 64};
  p.calls.push_back(rs);
  p.calls.push_back({OpKind::MatMul, {"flat", "W"}, "xW", {}});
  p.calls.push_back({OpKind::MatAdd, {"xW", "b"}, "logits", {}});
  if (with_argmax) p.calls.push_back({OpKind::ArgMax, {"logits"}, "y", {}});
  std::normal_distribution<float> nd(0.0f, 0.5f);
  auto rnd = [&](ring::Shape sh, float lo = 0.0f) {
    ir::FloatTensor t{sh, std::vector<float>(static_cast<size_t>(ring::numel(sh)))};
    for (auto& v : t.data) v = lo + nd(g);
    return t;
  };
  ir::WeightMap w{{"f", rnd({3, 3, 2, 4})}, {"g", rnd({4}, 1.0f)}, {"be", rnd({4})}, {"mu", rnd({4})},
                  {"va", rnd({4}, 2.0f)}, {"W", rnd({64, 5})}, {"b", rnd({5})}};
  for (auto& v : w.at("va").data) v = std::abs(v) + 0.5f;
  return ir::make_model(p, w);
}

TEST(Inference, MatchesPlaintextWithinTruncationDrift) {
  std::mt19937_64 g(25);
  for (int trial = 0; trial < 5; ++trial) {
    ir::FloatModel fm = small_cnn(g, false);
    fixedpoint::FixedModel m = fixedpoint::quantize_model(fm, 12);
    std::vector<int64_t> xv(128);
    for (auto& v : xv) v = static_cast<int64_t>(g() % 8192) - 4096;
    RingTensor x = signed_vec(xv).reshaped({8, 8, 2});
    RingTensor want = fixedpoint::fixed_interpret(m, x);
    LocalSession s("inf");
    std::array<RingTensor, 3> out;
    s.run([&](ProtocolContext& ctx) {
      out[static_cast<size_t>(ctx.role())] = run_inference(ctx, m.graph, ctx.role() == Role::P0 ? &m.weights : nullptr,
                                                           ctx.role() == Role::P1 ? &x : nullptr);
    });
    ASSERT_EQ(out[1].shape(), want.shape());
    for (size_t i = 0; i < want.size(); ++i) EXPECT_LE(std::abs(out[1].signed_at(i) - want.signed_at(i)), 64);
    EXPECT_EQ(s.ctx(Role::P0).ops().relu, 8 * 8 * 4);
    EXPECT_EQ(s.ctx(Role::P0).ops().comparisons, 4 * 4 * 4 * 3);
  }
}

TEST(Inference, ArgMaxProgram) {
  std::mt19937_64 g(26);
  ir::FloatModel fm = small_cnn(g, true);
  fixedpoint::FixedModel m = fixedpoint::quantize_model(fm, 12);
  std::vector<int64_t> xv(128);
  for (auto& v : xv) v = static_cast<int64_t>(g() % 8192) - 4096;
  RingTensor x = signed_vec(xv).reshaped({8, 8, 2});
  LocalSession s("inf2");
  std::array<RingTensor, 3> out;
  s.run([&](ProtocolContext& ctx) {
    out[static_cast<size_t>(ctx.role())] = run_inference(ctx, m.graph, ctx.role() == Role::P0 ? &m.weights : nullptr,
                                                         ctx.role() == Role::P1 ? &x : nullptr);
  });
  EXPECT_EQ(out[1], fixedpoint::fixed_interpret(m, x));
}

TEST(Keys, EachRoleHoldsOnlyItsKeys) {
  EXPECT_FALSE(test_keys(Role::P1, "k").k0.has_value());
  EXPECT_FALSE(test_keys(Role::P0, "k").k1.has_value());
  EXPECT_FALSE(test_keys(Role::P2, "k").k01.has_value());
  EXPECT_EQ(test_keys(Role::P0, "k").k0, test_keys(Role::P2, "k").k0);
  EXPECT_NE(test_keys(Role::P0, "k").entropy, test_keys(Role::P1, "k").entropy);
}

}  // namespace
}  // namespace triad::porthos
