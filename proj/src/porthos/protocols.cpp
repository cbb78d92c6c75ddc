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

#include "triad/porthos/protocols.hpp"

#include <algorithm>

#include "triad/error.hpp"
#include "triad/fixedpoint/fixed.hpp"
#include "triad/ir/library.hpp"

namespace triad::porthos {

namespace zlm1 = ring::zlm1;
namespace zp = ring::zp;

namespace {

constexpr int kL = ring::kBitWidth;

int64_t n_of(const RingTensor& t) { return static_cast<int64_t>(t.size()); }

RingTensor draw(ProtocolContext& ctx, KeyId k, RingId ring, const Shape& shape) {
  return ctx.prf(k).expand(ring, shape);
}

// Uniform in [0, bound) by rejection.
uint64_t uniform_below(PrfStream& s, uint64_t bound) {
  const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
  for (;;) {
    const uint64_t v = s.next_u64();
    if (v < limit) return v % bound;
  }
}

RingTensor zero_share(ProtocolContext& ctx, RingId ring, const Shape& shape) {
  RingTensor u = draw(ctx, KeyId::K01, ring, shape);
  return ctx.role() == Role::P0 ? u : -u;
}

void check_rank2(const RingTensor& t, const char* what) {
  TRIAD_ENFORCE(t.shape().size() == 2, ShapeError,
                std::string(what) + " must be rank 2, got " + ring::shape_str(t.shape()));
}

}  // namespace

RingTensor reshape_filter(const RingTensor& y) {
  check_rank2(y, "filter");
  TRIAD_ENFORCE(y.shape()[0] == y.shape()[1], ShapeError, "filter must be square");
  return y.reshaped({n_of(y), 1});
}

RingTensor reshape_input(const RingTensor& x, int64_t f) {
  check_rank2(x, "input");
  const int64_t m = x.shape()[0];
  TRIAD_ENFORCE(x.shape()[1] == m, ShapeError, "input must be square");
  TRIAD_ENFORCE(f >= 1 && f <= m, ShapeError,
                "filter size " + std::to_string(f) + " does not fit input " + std::to_string(m));
  const int64_t q = m - f + 1;
  return RingTensor(x.ring(), {q * q, f * f}, ir::lib::im2col<uint64_t>(x.data(), m, m, 1, f, f, 1, 1));
}

RingTensor reshape_output(const RingTensor& z) {
  check_rank2(z, "output");
  int64_t q = 0;
  while ((q + 1) * (q + 1) <= z.shape()[0]) ++q;
  TRIAD_ENFORCE(z.shape()[1] == 1 && q * q == z.shape()[0], ShapeError,
                "output must be q^2 x 1, got " + ring::shape_str(z.shape()));
  return z.reshaped({q, q});
}

RingTensor share_private(ProtocolContext& ctx, Role owner, const RingTensor& value) {
  TRIAD_ENFORCE(owner != Role::P2, Error, "P2 holds no private input");
  if (ctx.is_p2()) return RingTensor(value.ring(), value.shape());
  RingTensor r = draw(ctx, KeyId::K01, value.ring(), value.shape());
  return ctx.role() == owner ? value - r : r;
}

RingTensor reveal(ProtocolContext& ctx, const RingTensor& share) {
  if (ctx.is_p2()) return RingTensor(share.ring(), share.shape());
  ProtocolContext::Scope sc(ctx, "Reveal");
  auto theirs = ctx.exchange(share.ring(), share.data());
  return share + RingTensor(share.ring(), share.shape(), std::move(theirs));
}

RingTensor reveal_to(ProtocolContext& ctx, Role to, const RingTensor& share) {
  TRIAD_ENFORCE(to != Role::P2, Error, "outputs are opened to P0 or P1");
  if (ctx.is_p2()) return RingTensor(share.ring(), share.shape());
  ProtocolContext::Scope sc(ctx, "Reveal");
  if (ctx.role() != to) {
    ctx.send(to, share.ring(), share.data());
    return share;
  }
  return share + RingTensor(share.ring(), share.shape(), ctx.recv(ctx.other(), share.ring(), share.size()));
}

RingTensor fresh_share(ProtocolContext& ctx, RingId ring, int64_t count, int64_t per_instance,
                       std::span<const uint64_t> values, const std::string& step) {
  const uint64_t base = ctx.take_instances(static_cast<uint64_t>(count));
  const size_t per = static_cast<size_t>(per_instance);
  const int64_t total = count * per_instance;
  const int64_t n_even = (count + static_cast<int64_t>(base % 2 == 0 ? 1 : 0)) / 2;
  const int64_t n_odd = count - n_even;

  if (ctx.is_p2()) {
    TRIAD_ENFORCE(static_cast<int64_t>(values.size()) == total, ShapeError,
                  step + ": P2 holds " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(total));
    std::vector<uint64_t> to_p0, to_p1, mask(per);
    to_p0.reserve(static_cast<size_t>(n_odd) * per);
    to_p1.reserve(static_cast<size_t>(n_even) * per);
    for (int64_t i = 0; i < count; ++i) {
      const bool even = (base + static_cast<uint64_t>(i)) % 2 == 0;
      ctx.prf(even ? KeyId::K0 : KeyId::K1).expand_into(ring, mask);
      auto& dst = even ? to_p1 : to_p0;
      for (size_t e = 0; e < per; ++e) dst.push_back(ring::sub(ring, values[i * per + e], mask[e]));
    }
    ctx.send(Role::P0, ring, to_p0);
    ctx.send(Role::P1, ring, to_p1);
    ctx.fresh_log().push_back({step, n_odd, n_even, per_instance});
    return RingTensor(ring, {total});
  }

  const bool p0 = ctx.role() == Role::P0;
  auto sent = ctx.recv(Role::P2, ring, static_cast<size_t>(p0 ? n_odd : n_even) * per);
  std::vector<uint64_t> out(static_cast<size_t>(total));
  size_t next = 0;
  for (int64_t i = 0; i < count; ++i) {
    const bool even = (base + static_cast<uint64_t>(i)) % 2 == 0;
    std::span<uint64_t> dst(out.data() + i * per, per);
    if (even == p0) {
      ctx.prf(p0 ? KeyId::K0 : KeyId::K1).expand_into(ring, dst);
    } else {
      std::copy_n(sent.begin() + static_cast<std::ptrdiff_t>(next), per, dst.begin());
      next += per;
    }
  }
  return RingTensor(ring, {total}, std::move(out));
}

RingTensor add_public(ProtocolContext& ctx, const RingTensor& x, uint64_t c) {
  if (ctx.role() != Role::P0) return x;
  RingTensor out = x;
  for (auto& v : out.mutable_data()) v = ring::add(x.ring(), v, c);
  return out;
}

RingTensor matmul(ProtocolContext& ctx, const RingTensor& x, const RingTensor& y) {
  check_rank2(x, "matmul lhs");
  check_rank2(y, "matmul rhs");
  TRIAD_ENFORCE(x.shape()[1] == y.shape()[0], ShapeError,
                "matmul " + ring::shape_str(x.shape()) + " x " + ring::shape_str(y.shape()));
  ProtocolContext::Scope sc(ctx, "MatMul");
  const int64_t l = x.shape()[0], n = y.shape()[1];

  if (ctx.is_p2()) {
    RingTensor a0 = draw(ctx, KeyId::K0, RingId::ZL, x.shape());
    RingTensor b0 = draw(ctx, KeyId::K0, RingId::ZL, y.shape());
    RingTensor c0 = draw(ctx, KeyId::K0, RingId::ZL, {l, n});
    RingTensor a1 = draw(ctx, KeyId::K1, RingId::ZL, x.shape());
    RingTensor b1 = draw(ctx, KeyId::K1, RingId::ZL, y.shape());
    RingTensor c1 = ring::matmul(a0 + a1, b0 + b1) - c0;
    ctx.send(Role::P1, RingId::ZL, c1.data());
    return RingTensor(RingId::ZL, {l, n});
  }

  const bool p0 = ctx.role() == Role::P0;
  const KeyId k = p0 ? KeyId::K0 : KeyId::K1;
  RingTensor a = draw(ctx, k, RingId::ZL, x.shape());
  RingTensor b = draw(ctx, k, RingId::ZL, y.shape());
  RingTensor c = p0 ? draw(ctx, k, RingId::ZL, {l, n})
                    : RingTensor(RingId::ZL, {l, n}, ctx.recv(Role::P2, RingId::ZL, static_cast<size_t>(l * n)));

  RingTensor e = x - a, f = y - b;
  std::vector<uint64_t> mine(e.vec());
  mine.insert(mine.end(), f.vec().begin(), f.vec().end());
  auto theirs = ctx.exchange(RingId::ZL, mine);
  std::vector<uint64_t> te(theirs.begin(), theirs.begin() + n_of(e)), tf(theirs.begin() + n_of(e), theirs.end());
  e += RingTensor(RingId::ZL, e.shape(), std::move(te));
  f += RingTensor(RingId::ZL, f.shape(), std::move(tf));

  RingTensor z = ring::matmul(x, f) + ring::matmul(e, y) + c + zero_share(ctx, RingId::ZL, {l, n});
  if (!p0) z -= ring::matmul(e, f);
  return z;
}

RingTensor conv2d(ProtocolContext& ctx, const RingTensor& x, const RingTensor& f, int64_t sh, int64_t sw) {
  const Shape& xs = x.shape();
  const Shape& fs = f.shape();
  TRIAD_ENFORCE(xs.size() == 3 && fs.size() == 4 && xs[2] == fs[2] && fs[0] <= xs[0] && fs[1] <= xs[1] &&
                    sh >= 1 && sw >= 1,
                ShapeError, "conv2d " + ring::shape_str(xs) + " with filter " + ring::shape_str(fs));
  ProtocolContext::Scope sc(ctx, "Conv2d");
  const int64_t oh = (xs[0] - fs[0]) / sh + 1, ow = (xs[1] - fs[1]) / sw + 1;
  const int64_t cols = fs[0] * fs[1] * fs[2], co = fs[3];
  auto im2col = [&](const RingTensor& t) {
    return RingTensor(RingId::ZL, {oh * ow, cols},
                      ir::lib::im2col<uint64_t>(t.data(), xs[0], xs[1], xs[2], fs[0], fs[1], sh, sw));
  };
  auto flat = [&](const RingTensor& t) { return t.reshaped({cols, co}); };
  const Shape out_mat{oh * ow, co};

  if (ctx.is_p2()) {
    RingTensor a0 = draw(ctx, KeyId::K0, RingId::ZL, xs);
    RingTensor b0 = draw(ctx, KeyId::K0, RingId::ZL, fs);
    RingTensor c0 = draw(ctx, KeyId::K0, RingId::ZL, out_mat);
    RingTensor a1 = draw(ctx, KeyId::K1, RingId::ZL, xs);
    RingTensor b1 = draw(ctx, KeyId::K1, RingId::ZL, fs);
    RingTensor c1 = ring::matmul(im2col(a0 + a1), flat(b0 + b1)) - c0;
    ctx.send(Role::P1, RingId::ZL, c1.data());
    return RingTensor(RingId::ZL, {oh, ow, co});
  }

  const bool p0 = ctx.role() == Role::P0;
  const KeyId k = p0 ? KeyId::K0 : KeyId::K1;
  RingTensor a = draw(ctx, k, RingId::ZL, xs);
  RingTensor b = draw(ctx, k, RingId::ZL, fs);
  RingTensor c = p0 ? draw(ctx, k, RingId::ZL, out_mat)
                    : RingTensor(RingId::ZL, out_mat,
                                 ctx.recv(Role::P2, RingId::ZL, static_cast<size_t>(oh * ow * co)));

  RingTensor e = x - a, g = f - b;
  std::vector<uint64_t> mine(e.vec());
  mine.insert(mine.end(), g.vec().begin(), g.vec().end());
  auto theirs = ctx.exchange(RingId::ZL, mine);
  std::vector<uint64_t> te(theirs.begin(), theirs.begin() + n_of(e)), tg(theirs.begin() + n_of(e), theirs.end());
  e += RingTensor(RingId::ZL, xs, std::move(te));
  g += RingTensor(RingId::ZL, fs, std::move(tg));

  RingTensor ecol = im2col(e), gf = flat(g);
  RingTensor z = ring::matmul(im2col(x), gf) + ring::matmul(ecol, flat(f)) + c +
                 zero_share(ctx, RingId::ZL, out_mat);
  if (!p0) z -= ring::matmul(ecol, gf);
  return z.reshaped({oh, ow, co});
}

RingTensor mul(ProtocolContext& ctx, const RingTensor& x, const RingTensor& y) {
  TRIAD_ENFORCE(x.shape() == y.shape(), ShapeError,
                "mul " + ring::shape_str(x.shape()) + " vs " + ring::shape_str(y.shape()));
  ProtocolContext::Scope sc(ctx, "Mul");
  const int64_t n = n_of(x);
  const Shape flat{n};

  if (ctx.is_p2()) {
    RingTensor a0 = draw(ctx, KeyId::K0, RingId::ZL, flat), b0 = draw(ctx, KeyId::K0, RingId::ZL, flat);
    RingTensor a1 = draw(ctx, KeyId::K1, RingId::ZL, flat), b1 = draw(ctx, KeyId::K1, RingId::ZL, flat);
    RingTensor c = ring::hadamard(a0 + a1, b0 + b1);
    fresh_share(ctx, RingId::ZL, n, 1, c.data(), "Mul/c");
    return RingTensor(RingId::ZL, x.shape());
  }

  const bool p0 = ctx.role() == Role::P0;
  const KeyId k = p0 ? KeyId::K0 : KeyId::K1;
  RingTensor a = draw(ctx, k, RingId::ZL, flat), b = draw(ctx, k, RingId::ZL, flat);
  RingTensor c = fresh_share(ctx, RingId::ZL, n, 1, {}, "Mul/c");
  RingTensor xf = x.reshaped(flat), yf = y.reshaped(flat);
  RingTensor e = xf - a, f = yf - b;
  std::vector<uint64_t> mine(e.vec());
  mine.insert(mine.end(), f.vec().begin(), f.vec().end());
  auto theirs = ctx.exchange(RingId::ZL, mine);
  std::vector<uint64_t> te(theirs.begin(), theirs.begin() + n), tf(theirs.begin() + n, theirs.end());
  e += RingTensor(RingId::ZL, flat, std::move(te));
  f += RingTensor(RingId::ZL, flat, std::move(tf));
  RingTensor z = ring::hadamard(xf, f) + ring::hadamard(e, yf) + c + zero_share(ctx, RingId::ZL, flat);
  if (!p0) z -= ring::hadamard(e, f);
  return z.reshaped(x.shape());
}

RingTensor share_bits(ProtocolContext& ctx, std::span<const uint64_t> x, int64_t count, int width,
                      const std::string& step) {
  TRIAD_ENFORCE(width >= 1 && width <= kL, Error, "bit width out of range");
  std::vector<uint64_t> bits;
  if (ctx.is_p2()) {
    TRIAD_ENFORCE(static_cast<int64_t>(x.size()) == count, ShapeError, step + ": value count mismatch");
    bits.resize(static_cast<size_t>(count * width));
    for (int64_t i = 0; i < count; ++i) {
      for (int b = 0; b < width; ++b) bits[static_cast<size_t>(i * width + b)] = (x[i] >> b) & 1;
    }
  }
  return fresh_share(ctx, RingId::Zp, count, width, bits, step);
}

RingTensor private_compare(ProtocolContext& ctx, const RingTensor& bits, std::span<const uint64_t> r,
                           std::span<const uint8_t> beta, RingId out, int width) {
  TRIAD_ENFORCE(bits.ring() == RingId::Zp, FormatError,
                "bit shares must live in Z_p, got " + std::string(ring::ring_name(bits.ring())));
  TRIAD_ENFORCE(width >= 1 && width <= kL && bits.size() % static_cast<size_t>(width) == 0, ShapeError,
                "bit shares do not split into width-" + std::to_string(width) + " groups");
  ProtocolContext::Scope sc(ctx, "PrivateCompare");
  const size_t w = static_cast<size_t>(width);
  const size_t count = bits.size() / w;

  if (ctx.is_p2()) {
    auto d0 = ctx.recv(Role::P0, RingId::Zp, bits.size());
    auto d1 = ctx.recv(Role::P1, RingId::Zp, bits.size());
    std::vector<uint64_t> res(count, 0);
    for (size_t i = 0; i < count; ++i) {
      for (size_t b = 0; b < w; ++b) {
        if (zp::add(d0[i * w + b], d1[i * w + b]) == 0) res[i] = 1;
      }
    }
    return fresh_share(ctx, out, static_cast<int64_t>(count), 1, res, "PrivateCompare/beta'");
  }

  TRIAD_ENFORCE(r.size() == count && beta.size() == count, ShapeError, "private_compare: r/beta size mismatch");
  const uint64_t j = ctx.j();
  const uint64_t top = width == kL ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
  PrfStream& common = ctx.prf(KeyId::K01);
  std::vector<uint64_t> d(bits.size()), c(w), perm(w);
  for (size_t i = 0; i < count; ++i) {
    const uint64_t* x = bits.data().data() + i * w;
    const bool special = beta[i] == 1 && r[i] == top;
    if (special) {
      for (size_t b = 0; b < w; ++b) {
        const uint64_t u = common.next_zp();
        c[b] = j == 0 ? (b == 0 ? u : zp::add(u, 1)) : zp::neg(u);
      }
    } else {
      const uint64_t t = beta[i] == 0 ? r[i] : r[i] + 1;
      uint64_t suffix = 0;
      for (size_t b = w; b-- > 0;) {
        const uint64_t tb = (t >> b) & 1;
        const uint64_t jt = j * tb;
        uint64_t cb = beta[i] == 0 ? zp::sub(jt, x[b]) : zp::sub(x[b], jt);
        c[b] = zp::add(zp::add(cb, j), suffix);
        // w_b = x_b + j t_b - 2 t_b x_b
        const uint64_t wb = tb ? zp::sub(jt, x[b]) : x[b];
        suffix = zp::add(suffix, wb);
      }
    }
    for (size_t b = 0; b < w; ++b) c[b] = zp::mul(c[b], common.next_zp_nonzero());
    for (size_t b = 0; b < w; ++b) perm[b] = b;
    for (size_t b = w; b-- > 1;) std::swap(perm[b], perm[uniform_below(common, b + 1)]);
    for (size_t b = 0; b < w; ++b) d[i * w + b] = c[perm[b]];
  }
  ctx.send(Role::P2, RingId::Zp, d);
  return fresh_share(ctx, out, static_cast<int64_t>(count), 1, {}, "PrivateCompare/beta'");
}

RingTensor share_convert(ProtocolContext& ctx, const RingTensor& a) {
  TRIAD_ENFORCE(a.ring() == RingId::ZL, FormatError, "share_convert expects Z_L shares");
  ProtocolContext::Scope sc(ctx, "ShareConvert");
  const size_t n = a.size();

  if (ctx.is_p2()) {
    auto t0 = ctx.recv(Role::P0, RingId::ZL, n);
    auto t1 = ctx.recv(Role::P1, RingId::ZL, n);
    std::vector<uint64_t> x(n), delta(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = t0[i] + t1[i];
      delta[i] = ring::wrap(t0[i], t1[i]);
    }
    RingTensor xb = share_bits(ctx, x, static_cast<int64_t>(n), kL, "ShareConvert/bits");
    fresh_share(ctx, RingId::ZLm1, static_cast<int64_t>(n), 1, delta, "ShareConvert/delta");
    private_compare(ctx, xb, {}, {}, RingId::ZLm1, kL);
    return RingTensor(RingId::ZLm1, a.shape());
  }

  const uint64_t j = ctx.j();
  PrfStream& common = ctx.prf(KeyId::K01);
  std::vector<uint64_t> rm1(n), alpha(n), u(n), masked(n), beta(n);
  std::vector<uint8_t> eta2(n);
  for (size_t i = 0; i < n; ++i) {
    uint64_t r = 0;
    while (r == 0) r = common.next_u64();
    const uint64_t r0 = common.next_u64(), r1 = r - r0;
    eta2[i] = static_cast<uint8_t>(common.next_bit());
    const uint64_t u0 = common.next_zlm1();
    u[i] = j == 0 ? u0 : zlm1::neg(u0);
    rm1[i] = r - 1;
    alpha[i] = ring::wrap(r0, r1);
    const uint64_t rj = j == 0 ? r0 : r1;
    masked[i] = a[i] + rj;
    beta[i] = ring::wrap(a[i], rj);
  }
  ctx.send(Role::P2, RingId::ZL, masked);
  RingTensor xb = share_bits(ctx, {}, static_cast<int64_t>(n), kL, "ShareConvert/bits");
  RingTensor delta = fresh_share(ctx, RingId::ZLm1, static_cast<int64_t>(n), 1, {}, "ShareConvert/delta");
  RingTensor eta1 = private_compare(ctx, xb, rm1, eta2, RingId::ZLm1, kL);

  std::vector<uint64_t> y(n);
  for (size_t i = 0; i < n; ++i) {
    const uint64_t e2 = eta2[i];
    // eta_j = eta'_j + (1 - j) eta'' - 2 eta'' eta'_j
    uint64_t eta = e2 ? zlm1::neg(eta1[i]) : eta1[i];
    if (j == 0) eta = zlm1::add(eta, e2);
    uint64_t theta = zlm1::add(zlm1::add(beta[i], delta[i]), eta);
    if (j == 0) theta = zlm1::sub(theta, zlm1::add(alpha[i], 1));
    y[i] = zlm1::add(zlm1::sub(zlm1::reduce(a[i]), theta), u[i]);
  }
  return RingTensor(RingId::ZLm1, a.shape(), std::move(y));
}

RingTensor compute_msb(ProtocolContext& ctx, const RingTensor& a) {
  TRIAD_ENFORCE(a.ring() == RingId::ZLm1, FormatError, "compute_msb expects Z_{L-1} shares");
  ProtocolContext::Scope sc(ctx, "ComputeMSB");
  const size_t n = a.size();
  const int64_t cnt = static_cast<int64_t>(n);

  if (ctx.is_p2()) {
    std::vector<uint64_t> x(n), lsb(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = ctx.local().next_zlm1();
      lsb[i] = x[i] & 1;
    }
    fresh_share(ctx, RingId::ZLm1, cnt, 1, x, "ComputeMSB/x");
    RingTensor xb = share_bits(ctx, x, cnt, kL, "ComputeMSB/bits");
    fresh_share(ctx, RingId::ZL, cnt, 1, lsb, "ComputeMSB/x0");
    private_compare(ctx, xb, {}, {}, RingId::ZL, kL);
    RingTensor dummy(RingId::ZL, {cnt});
    mul(ctx, dummy, dummy);
    return RingTensor(RingId::ZL, a.shape());
  }

  const uint64_t j = ctx.j();
  PrfStream& common = ctx.prf(KeyId::K01);
  std::vector<uint8_t> beta(n);
  std::vector<uint64_t> u(n);
  for (size_t i = 0; i < n; ++i) {
    beta[i] = static_cast<uint8_t>(common.next_bit());
    const uint64_t u0 = common.next_u64();
    u[i] = j == 0 ? u0 : uint64_t{0} - u0;
  }
  RingTensor x = fresh_share(ctx, RingId::ZLm1, cnt, 1, {}, "ComputeMSB/x");
  RingTensor xb = share_bits(ctx, {}, cnt, kL, "ComputeMSB/bits");
  RingTensor x0 = fresh_share(ctx, RingId::ZL, cnt, 1, {}, "ComputeMSB/x0");

  std::vector<uint64_t> rj(n);
  for (size_t i = 0; i < n; ++i) rj[i] = zlm1::add(zlm1::add(a[i], a[i]), x[i]);
  auto other = ctx.exchange(RingId::ZLm1, rj);
  std::vector<uint64_t> r(n);
  for (size_t i = 0; i < n; ++i) r[i] = zlm1::add(rj[i], other[i]);

  RingTensor bp = private_compare(ctx, xb, r, beta, RingId::ZL, kL);
  RingTensor gamma(RingId::ZL, {cnt}), delta(RingId::ZL, {cnt});
  for (size_t i = 0; i < n; ++i) {
    const uint64_t b = beta[i], r0 = r[i] & 1;
    gamma[i] = bp[i] + j * b - 2 * b * bp[i];
    delta[i] = x0[i] + j * r0 - 2 * r0 * x0[i];
  }
  RingTensor theta = mul(ctx, gamma, delta);
  std::vector<uint64_t> alpha(n);
  for (size_t i = 0; i < n; ++i) alpha[i] = gamma[i] + delta[i] - 2 * theta[i] + u[i];
  return RingTensor(RingId::ZL, a.shape(), std::move(alpha));
}

RingTensor drelu(ProtocolContext& ctx, const RingTensor& a) {
  ProtocolContext::Scope sc(ctx, "DReLU");
  RingTensor m = compute_msb(ctx, share_convert(ctx, add_public(ctx, a, ~uint64_t{0})));
  if (ctx.is_p2()) return RingTensor(RingId::ZL, a.shape());
  return add_public(ctx, -m, 1).reshaped(a.shape());
}

RingTensor relu(ProtocolContext& ctx, const RingTensor& a) {
  ProtocolContext::Scope sc(ctx, "ReLU");
  ctx.ops().relu += n_of(a);
  return mul(ctx, drelu(ctx, a), a);
}

namespace {

RingTensor column(const RingTensor& m, int64_t k) {
  const int64_t rows = m.shape()[0], n = m.shape()[1];
  std::vector<uint64_t> out(static_cast<size_t>(rows));
  for (int64_t r = 0; r < rows; ++r) out[static_cast<size_t>(r)] = m[static_cast<size_t>(r * n + k)];
  return RingTensor(m.ring(), {rows}, std::move(out));
}

RingTensor tile2(const RingTensor& a, const RingTensor& b) {
  std::vector<uint64_t> v(a.vec());
  v.insert(v.end(), b.vec().begin(), b.vec().end());
  return RingTensor(RingId::ZL, {n_of(a) + n_of(b)}, std::move(v));
}

std::pair<RingTensor, RingTensor> split2(const RingTensor& t) {
  const auto h = static_cast<std::ptrdiff_t>(t.size() / 2);
  return {RingTensor(RingId::ZL, {h}, std::vector<uint64_t>(t.vec().begin(), t.vec().begin() + h)),
          RingTensor(RingId::ZL, {h}, std::vector<uint64_t>(t.vec().begin() + h, t.vec().end()))};
}

}  // namespace

RingTensor max_rows(ProtocolContext& ctx, const RingTensor& cand) {
  check_rank2(cand, "max_rows input");
  ProtocolContext::Scope sc(ctx, "MaxPool");
  RingTensor cur = column(cand, 0);
  for (int64_t k = 1; k < cand.shape()[1]; ++k) {
    RingTensor next = column(cand, k);
    RingTensor d = cur - next;
    ctx.ops().comparisons += n_of(d);
    cur = next + mul(ctx, drelu(ctx, d), d);
  }
  return cur;
}

std::pair<RingTensor, RingTensor> argmax_rows(ProtocolContext& ctx, const RingTensor& cand) {
  check_rank2(cand, "argmax_rows input");
  ProtocolContext::Scope sc(ctx, "ArgMax");
  RingTensor cur = column(cand, 0);
  RingTensor idx(RingId::ZL, cur.shape());
  for (int64_t k = 1; k < cand.shape()[1]; ++k) {
    RingTensor next = column(cand, k);
    RingTensor d = cur - next;
    ctx.ops().comparisons += n_of(d);
    RingTensor b = drelu(ctx, d);
    RingTensor di = add_public(ctx, idx, uint64_t{0} - static_cast<uint64_t>(k));
    auto [bd, bi] = split2(mul(ctx, tile2(b, b), tile2(d, di)));
    cur = next + bd;
    idx = add_public(ctx, bi, static_cast<uint64_t>(k));
  }
  return {cur, idx};
}

namespace {

std::pair<RingTensor, Shape> gather_windows(const RingTensor& x, int64_t a, int64_t b, int64_t sh, int64_t sw) {
  const Shape& xs = x.shape();
  TRIAD_ENFORCE(xs.size() == 3 && a >= 1 && b >= 1 && a <= xs[0] && b <= xs[1] && sh >= 1 && sw >= 1, ShapeError,
                "pool window does not fit " + ring::shape_str(xs));
  const auto idx = ir::lib::pool_windows(xs, a, b, sh, sw);
  const int64_t win = a * b;
  const Shape out{(xs[0] - a) / sh + 1, (xs[1] - b) / sw + 1, xs[2]};
  std::vector<uint64_t> v(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) v[i] = x[static_cast<size_t>(idx[i])];
  return {RingTensor(x.ring(), {ring::numel(out), win}, std::move(v)), out};
}

}  // namespace

RingTensor maxpool(ProtocolContext& ctx, const RingTensor& x, int64_t a, int64_t b, int64_t sh, int64_t sw) {
  auto [cand, out] = gather_windows(x, a, b, sh, sw);
  return max_rows(ctx, cand).reshaped(out);
}

RingTensor avgpool(ProtocolContext& ctx, const RingTensor& x, int64_t a, int64_t b, int64_t sh, int64_t sw,
                   int scale) {
  auto [cand, out] = gather_windows(x, a, b, sh, sw);
  if (ctx.is_p2()) return RingTensor(RingId::ZL, out);
  const uint64_t recip = fixedpoint::rho(1.0f / static_cast<float>(a * b), scale);
  const int64_t win = a * b;
  RingTensor sum(RingId::ZL, out);
  for (size_t w = 0; w < sum.size(); ++w) {
    uint64_t s = 0;
    for (int64_t k = 0; k < win; ++k) s += cand[w * static_cast<size_t>(win) + static_cast<size_t>(k)];
    sum[w] = s * recip;
  }
  return ring::arithmetic_shift(sum, scale);
}

RingTensor fused_batchnorm(ProtocolContext& ctx, const RingTensor& a, const RingTensor& b, const RingTensor& c) {
  TRIAD_ENFORCE(!a.empty() && b.shape() == c.shape() && b.size() > 0 && a.size() % b.size() == 0 &&
                    a.shape().back() == n_of(b),
                ShapeError,
                "batch norm " + ring::shape_str(a.shape()) + " with " + ring::shape_str(b.shape()));
  ProtocolContext::Scope sc(ctx, "FusedBatchNorm");
  const size_t na = a.size(), nb = b.size();
  const Shape fa{static_cast<int64_t>(na)}, fb{static_cast<int64_t>(nb)};
  auto bcast = [&](const RingTensor& big, const RingTensor& per) {
    RingTensor out(RingId::ZL, fa);
    for (size_t i = 0; i < na; ++i) out[i] = big[i] * per[i % nb];
    return out;
  };

  if (ctx.is_p2()) {
    RingTensor a0 = draw(ctx, KeyId::K0, RingId::ZL, fa), b0 = draw(ctx, KeyId::K0, RingId::ZL, fb);
    RingTensor c0 = draw(ctx, KeyId::K0, RingId::ZL, fa);
    RingTensor a1 = draw(ctx, KeyId::K1, RingId::ZL, fa), b1 = draw(ctx, KeyId::K1, RingId::ZL, fb);
    RingTensor c1 = bcast(a0 + a1, b0 + b1) - c0;
    ctx.send(Role::P1, RingId::ZL, c1.data());
    return RingTensor(RingId::ZL, a.shape());
  }

  const bool p0 = ctx.role() == Role::P0;
  const KeyId k = p0 ? KeyId::K0 : KeyId::K1;
  RingTensor ma = draw(ctx, k, RingId::ZL, fa), mb = draw(ctx, k, RingId::ZL, fb);
  RingTensor trip = p0 ? draw(ctx, k, RingId::ZL, fa) : RingTensor(RingId::ZL, fa, ctx.recv(Role::P2, RingId::ZL, na));
  RingTensor af = a.reshaped(fa);
  RingTensor e = af - ma, f = b - mb;
  auto theirs = ctx.exchange(RingId::ZL, tile2(e, f).data());
  for (size_t i = 0; i < na; ++i) e[i] += theirs[i];
  for (size_t i = 0; i < nb; ++i) f[i] += theirs[na + i];

  RingTensor z = bcast(af, f) + bcast(e, b) + trip + zero_share(ctx, RingId::ZL, fa);
  if (!p0) z -= bcast(e, f);
  for (size_t i = 0; i < na; ++i) z[i] += c[i % nb];
  return z.reshaped(a.shape());
}

RingTensor scaledown(ProtocolContext& ctx, const RingTensor& a, int s) {
  ctx.ops().scaledown_elems += n_of(a);
  if (ctx.is_p2()) return RingTensor(RingId::ZL, a.shape());
  return ring::arithmetic_shift(a, s);
}

}  // namespace triad::porthos
