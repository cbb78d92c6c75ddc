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

#include "triad/fixedpoint/fixed.hpp"

#include <cmath>
#include <cstring>

#include "triad/error.hpp"
#include "triad/ir/library.hpp"

namespace triad::fixedpoint {

using ir::Attrs;
using ir::OpKind;
using ring::RingId;

RhoResult rho_checked(float r, int s) {
  TRIAD_ENFORCE(std::isfinite(r), FormatError, "rho of a non-finite value");
  TRIAD_ENFORCE(s >= 0, FormatError, "negative scale");
  uint32_t bits;
  std::memcpy(&bits, &r, 4);
  const bool neg = (bits >> 31) != 0;
  const int exp8 = static_cast<int>((bits >> 23) & 0xff);
  uint64_t m = bits & 0x7fffff;
  int e;
  if (exp8 == 0) {
    e = -149;
  } else {
    m |= 1u << 23;
    e = exp8 - 150;
  }
  if (m == 0) return {0, false};
  // |r| * 2^s = m * 2^k
  const int k = e + s;
  unsigned __int128 mag;  // floor or ceil of m * 2^k, see below
  bool too_big = false;
  if (k >= 0) {
    if (k >= 100) {
      too_big = true;
      mag = k >= 128 ? 0 : static_cast<unsigned __int128>(m) << k;
    } else {
      mag = static_cast<unsigned __int128>(m) << k;
    }
  } else {
    const int d = -k;
    if (d >= 64) {
      mag = neg ? 1 : 0;  // 0 < m * 2^k < 1
    } else if (neg) {
      mag = (m + ((uint64_t{1} << d) - 1)) >> d;  // ceil, so -mag is the floor
    } else {
      mag = m >> d;
    }
  }
  constexpr unsigned __int128 kLimit = static_cast<unsigned __int128>(1) << 63;
  if (!too_big) too_big = neg ? mag > kLimit : mag >= kLimit;
  uint64_t low = static_cast<uint64_t>(mag);
  return {neg ? uint64_t{0} - low : low, too_big};
}

RingTensor quantize(const FloatTensor& t, int s, int64_t* overflows) {
  std::vector<uint64_t> d(t.data.size());
  for (size_t i = 0; i < d.size(); ++i) {
    RhoResult r = rho_checked(t.data[i], s);
    d[i] = r.value;
    if (overflows && r.overflow) ++*overflows;
  }
  return RingTensor(RingId::ZL, t.shape, std::move(d));
}

FixedModel quantize_model(const FloatModel& m, int s) {
  FixedModel fm;
  fm.config.scale = s;
  auto lowered = ir::lower(m.graph, s);
  fm.graph = std::move(lowered.llil);
  fm.trace = std::move(lowered.trace);

  std::map<std::string, const ir::Call*> bn_by_output;
  for (const auto& c : m.graph.calls) {
    if (c.op == OpKind::BatchNorm) bn_by_output[c.output] = &c;
  }
  for (const auto& d : fm.graph.decls) {
    if (d.kind != ir::DeclKind::Param) continue;
    if (auto it = m.weights.find(d.name); it != m.weights.end()) {
      fm.weights.emplace(d.name, quantize(it->second, s, &fm.overflowed_weights));
    }
  }
  for (const auto& c : fm.graph.calls) {
    if (c.op != OpKind::FusedBatchNorm) continue;
    const ir::Call& bn = *bn_by_output.at(c.output);
    const auto& gamma = m.weights.at(bn.inputs[1]).data;
    const auto& beta = m.weights.at(bn.inputs[2]).data;
    const auto& mean = m.weights.at(bn.inputs[3]).data;
    const auto& var = m.weights.at(bn.inputs[4]).data;
    const size_t n = gamma.size();
    FloatTensor B{{static_cast<int64_t>(n)}, std::vector<float>(n)};
    FloatTensor C{{static_cast<int64_t>(n)}, std::vector<float>(n)};
    for (size_t i = 0; i < n; ++i) {
      const double inv = static_cast<double>(gamma[i]) /
                         std::sqrt(static_cast<double>(var[i]) + bn.attrs.epsilon);
      B.data[i] = static_cast<float>(inv);
      C.data[i] = static_cast<float>(static_cast<double>(beta[i]) - inv * mean[i]);
    }
    fm.weights.emplace(c.inputs[1], quantize(B, s, &fm.overflowed_weights));
    fm.weights.emplace(c.inputs[2], quantize(C, 2 * s, &fm.overflowed_weights));
  }
  return fm;
}

RingTensor conv_plain(const RingTensor& x, const RingTensor& f, int64_t sh, int64_t sw) {
  const auto& xs = x.shape();
  const auto& fs = f.shape();
  const int64_t oh = (xs[0] - fs[0]) / sh + 1, ow = (xs[1] - fs[1]) / sw + 1;
  RingTensor cols(RingId::ZL, {oh * ow, fs[0] * fs[1] * fs[2]},
                  ir::lib::im2col<uint64_t>(x.data(), xs[0], xs[1], xs[2], fs[0], fs[1], sh, sw));
  RingTensor out = ring::matmul(cols, f.reshaped({fs[0] * fs[1] * fs[2], fs[3]}));
  return out.reshaped({oh, ow, fs[3]});
}

namespace {

std::pair<int64_t, int64_t> strides2(const Attrs& a, int64_t d0, int64_t d1) {
  if (a.strides.size() >= 2) return {a.strides[0], a.strides[1]};
  return {d0, d1};
}

Shape pool_out(const Shape& in, const Attrs& a) {
  auto [sh, sw] = strides2(a, a.pool[0], a.pool[1]);
  return {(in[0] - a.pool[0]) / sh + 1, (in[1] - a.pool[1]) / sw + 1, in[2]};
}

}  // namespace

RingTensor PlainBackend::load_input(const ir::Decl& d) {
  TRIAD_ENFORCE(input_.shape() == d.dims, ShapeError,
                "input is " + ring::shape_str(input_.shape()) + ", model expects " +
                    ring::shape_str(d.dims));
  return input_;
}

RingTensor PlainBackend::load_param(const ir::Decl& d) {
  auto it = m_.weights.find(d.name);
  TRIAD_ENFORCE(it != m_.weights.end(), FormatError, "missing weight '" + d.name + "'");
  return it->second;
}

RingTensor PlainBackend::matmul(const RingTensor& a, const RingTensor& b) { return ring::matmul(a, b); }

RingTensor PlainBackend::matadd(const RingTensor& a, const RingTensor& b) { return a + b; }

RingTensor PlainBackend::conv(const RingTensor& x, const RingTensor& f, const Attrs& a) {
  auto [sh, sw] = strides2(a, 1, 1);
  return conv_plain(x, f, sh, sw);
}

RingTensor PlainBackend::maxpool(const RingTensor& x, const Attrs& a) {
  auto [sh, sw] = strides2(a, a.pool[0], a.pool[1]);
  const auto idx = ir::lib::pool_windows(x.shape(), a.pool[0], a.pool[1], sh, sw);
  const size_t win = static_cast<size_t>(a.pool[0] * a.pool[1]);
  RingTensor out(RingId::ZL, pool_out(x.shape(), a));
  auto o = out.mutable_data();
  for (size_t w = 0; w < out.size(); ++w) {
    int64_t best = x.signed_at(static_cast<size_t>(idx[w * win]));
    for (size_t k = 1; k < win; ++k) best = std::max(best, x.signed_at(static_cast<size_t>(idx[w * win + k])));
    o[w] = ring::from_signed(best);
  }
  return out;
}

RingTensor PlainBackend::avgpool(const RingTensor& x, const Attrs& a, int scale) {
  auto [sh, sw] = strides2(a, a.pool[0], a.pool[1]);
  const auto idx = ir::lib::pool_windows(x.shape(), a.pool[0], a.pool[1], sh, sw);
  const size_t win = static_cast<size_t>(a.pool[0] * a.pool[1]);
  const uint64_t recip = rho(1.0f / static_cast<float>(win), scale);
  RingTensor out(RingId::ZL, pool_out(x.shape(), a));
  auto o = out.mutable_data();
  for (size_t w = 0; w < out.size(); ++w) {
    uint64_t sum = 0;
    for (size_t k = 0; k < win; ++k) sum += x[static_cast<size_t>(idx[w * win + k])];
    o[w] = sum * recip;
  }
  return ring::arithmetic_shift(out, scale);
}

RingTensor PlainBackend::relu(const RingTensor& x) {
  RingTensor out(RingId::ZL, x.shape());
  auto o = out.mutable_data();
  for (size_t i = 0; i < x.size(); ++i) o[i] = x.signed_at(i) > 0 ? x[i] : 0;
  return out;
}

RingTensor PlainBackend::argmax(const RingTensor& x) {
  size_t best = 0;
  for (size_t i = 1; i < x.size(); ++i) {
    if (x.signed_at(i) > x.signed_at(best)) best = i;
  }
  return RingTensor(RingId::ZL, {1}, {best});
}

RingTensor PlainBackend::fused_batchnorm(const RingTensor& a, const RingTensor& b,
                                         const RingTensor& c) {
  RingTensor out(RingId::ZL, a.shape());
  auto o = out.mutable_data();
  const size_t n = b.size();
  for (size_t i = 0; i < a.size(); ++i) o[i] = b[i % n] * a[i] + c[i % n];
  return out;
}

void PlainBackend::scaledown(RingTensor& a, int shift) { a = ring::arithmetic_shift(a, shift); }

RingTensor fixed_interpret(const FixedModel& m, const RingTensor& input) {
  PlainBackend b(m, input);
  return ir::execute(m.graph, b);
}

namespace {

std::vector<float> matmul_f(const std::vector<float>& a, const std::vector<float>& b, int64_t l,
                            int64_t k, int64_t n) {
  std::vector<float> out(static_cast<size_t>(l * n), 0.0f);
  for (int64_t i = 0; i < l; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      const float av = a[static_cast<size_t>(i * k + p)];
      for (int64_t j = 0; j < n; ++j) out[static_cast<size_t>(i * n + j)] += av * b[static_cast<size_t>(p * n + j)];
    }
  }
  return out;
}

}  // namespace

FloatTensor float_interpret(const FloatModel& m, const FloatTensor& input) {
  std::map<std::string, FloatTensor> env;
  const auto& g = m.graph;
  env[g.input] = input;
  TRIAD_ENFORCE(input.shape == g.at(g.input).dims, ShapeError, "input shape mismatch");
  auto get = [&](const std::string& n) -> const FloatTensor& {
    if (auto it = env.find(n); it != env.end()) return it->second;
    return m.weights.at(n);
  };
  for (const auto& c : g.calls) {
    const Shape out_shape = g.at(c.output).dims;
    FloatTensor out{out_shape, {}};
    const FloatTensor& x = get(c.inputs[0]);
    switch (c.op) {
      case OpKind::MatMul: {
        const FloatTensor& w = get(c.inputs[1]);
        out.data = matmul_f(x.data, w.data, x.shape[0], x.shape[1], w.shape[1]);
        break;
      }
      case OpKind::MatAdd: {
        const FloatTensor& y = get(c.inputs[1]);
        out.data = x.data;
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += y.data[i];
        break;
      }
      case OpKind::Conv: {
        const FloatTensor& f = get(c.inputs[1]);
        auto [sh, sw] = strides2(c.attrs, 1, 1);
        FloatTensor src = x;
        if (c.attrs.padding == "SAME") {
          auto sp = ir::same_padding(x.shape[0], x.shape[1], f.shape[0], f.shape[1], sh, sw);
          std::vector<int64_t> pads{sp.top, sp.bottom, sp.left, sp.right, 0, 0};
          src.data = ir::lib::pad<float>(x.data, x.shape, pads);
          src.shape = {x.shape[0] + sp.top + sp.bottom, x.shape[1] + sp.left + sp.right, x.shape[2]};
        }
        auto cols = ir::lib::im2col<float>(src.data, src.shape[0], src.shape[1], src.shape[2],
                                           f.shape[0], f.shape[1], sh, sw);
        const int64_t k = f.shape[0] * f.shape[1] * f.shape[2];
        out.data = matmul_f(cols, f.data, out_shape[0] * out_shape[1], k, f.shape[3]);
        break;
      }
      case OpKind::MaxPool:
      case OpKind::AvgPool: {
        auto [sh, sw] = strides2(c.attrs, c.attrs.pool[0], c.attrs.pool[1]);
        auto idx = ir::lib::pool_windows(x.shape, c.attrs.pool[0], c.attrs.pool[1], sh, sw);
        const size_t win = static_cast<size_t>(c.attrs.pool[0] * c.attrs.pool[1]);
        out.data.resize(idx.size() / win);
        for (size_t w = 0; w < out.data.size(); ++w) {
          float acc = x.data[static_cast<size_t>(idx[w * win])];
          for (size_t k = 1; k < win; ++k) {
            float v = x.data[static_cast<size_t>(idx[w * win + k])];
            acc = c.op == OpKind::MaxPool ? std::max(acc, v) : acc + v;
          }
          out.data[w] = c.op == OpKind::MaxPool ? acc : acc / static_cast<float>(win);
        }
        break;
      }
      case OpKind::ReLU:
        out.data = x.data;
        for (auto& v : out.data) v = std::max(v, 0.0f);
        break;
      case OpKind::ArgMax: {
        size_t best = 0;
        for (size_t i = 1; i < x.data.size(); ++i) {
          if (x.data[i] > x.data[best]) best = i;
        }
        out.data = {static_cast<float>(best)};
        break;
      }
      case OpKind::BatchNorm: {
        const auto& gamma = get(c.inputs[1]).data;
        const auto& beta = get(c.inputs[2]).data;
        const auto& mean = get(c.inputs[3]).data;
        const auto& var = get(c.inputs[4]).data;
        const size_t n = gamma.size();
        out.data = x.data;
        for (size_t i = 0; i < out.data.size(); ++i) {
          const size_t ch = i % n;
          out.data[i] = gamma[ch] * (x.data[i] - mean[ch]) /
                            std::sqrt(var[ch] + static_cast<float>(c.attrs.epsilon)) +
                        beta[ch];
        }
        break;
      }
      case OpKind::Reshape:
        out.data = x.data;
        break;
      case OpKind::Pad:
        out.data = ir::lib::pad<float>(x.data, x.shape, c.attrs.pads);
        break;
      case OpKind::Transpose:
        out.data = ir::lib::transpose<float>(x.data, x.shape, c.attrs.perm);
        break;
      case OpKind::Concat: {
        std::vector<std::span<const float>> parts;
        std::vector<Shape> shapes;
        for (const auto& n : c.inputs) {
          parts.push_back(get(n).data);
          shapes.push_back(get(n).shape);
        }
        out.data = ir::lib::concat<float>(parts, shapes, c.attrs.axis);
        break;
      }
      default:
        throw FormatError(std::string(ir::op_name(c.op)) + " is not an HLIL node");
    }
    env[c.output] = std::move(out);
  }
  return env.at(g.output);
}

int64_t predicted_class(const RingTensor& out) {
  if (out.shape() == Shape{1}) return out.signed_at(0);
  size_t best = 0;
  for (size_t i = 1; i < out.size(); ++i) {
    if (out.signed_at(i) > out.signed_at(best)) best = i;
  }
  return static_cast<int64_t>(best);
}

int64_t predicted_class(const FloatTensor& out) {
  if (out.shape == Shape{1}) return static_cast<int64_t>(out.data[0]);
  size_t best = 0;
  for (size_t i = 1; i < out.data.size(); ++i) {
    if (out.data[i] > out.data[best]) best = i;
  }
  return static_cast<int64_t>(best);
}

double fixed_accuracy(const FixedModel& m, const LabeledSet& data) {
  TRIAD_ENFORCE(!data.images.empty(), FormatError, "empty dataset");
  int64_t ok = 0;
  for (size_t i = 0; i < data.images.size(); ++i) {
    auto out = fixed_interpret(m, quantize(data.images[i], m.config.scale));
    ok += predicted_class(out) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(data.images.size());
}

double float_accuracy(const FloatModel& m, const LabeledSet& data) {
  TRIAD_ENFORCE(!data.images.empty(), FormatError, "empty dataset");
  int64_t ok = 0;
  for (size_t i = 0; i < data.images.size(); ++i) {
    ok += predicted_class(float_interpret(m, data.images[i])) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(data.images.size());
}

SweepResult scale_sweep(const FloatModel& m, const LabeledSet& validation) {
  TRIAD_ENFORCE(!validation.images.empty(), FormatError, "empty validation set");
  SweepResult r;
  r.accuracy.resize(64);
  for (int s = 0; s < 64; ++s) {
    r.accuracy[static_cast<size_t>(s)] = fixed_accuracy(quantize_model(m, s), validation);
    if (r.accuracy[static_cast<size_t>(s)] > r.accuracy[static_cast<size_t>(r.best_scale)]) {
      r.best_scale = s;
    }
  }
  return r;
}

}  // namespace triad::fixedpoint
