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

#include "triad/porthos/backend.hpp"

#include "triad/error.hpp"
#include "triad/porthos/protocols.hpp"

namespace triad::porthos {

namespace {

std::pair<int64_t, int64_t> strides_or(const ir::Attrs& a, int64_t d0, int64_t d1) {
  if (a.strides.size() >= 2) return {a.strides[0], a.strides[1]};
  return {d0, d1};
}

}  // namespace

RingTensor SecureBackend::load_input(const ir::Decl& d) {
  if (ctx_.role() != Role::P1) return share_private(ctx_, Role::P1, RingTensor(RingId::ZL, d.dims));
  TRIAD_ENFORCE(input_ != nullptr, Error, "P1 holds no input");
  TRIAD_ENFORCE(input_->shape() == d.dims, ShapeError,
                "input is " + ring::shape_str(input_->shape()) + ", model expects " + ring::shape_str(d.dims));
  return share_private(ctx_, Role::P1, *input_);
}

RingTensor SecureBackend::load_param(const ir::Decl& d) {
  if (ctx_.role() != Role::P0) return share_private(ctx_, Role::P0, RingTensor(RingId::ZL, d.dims));
  TRIAD_ENFORCE(weights_ != nullptr, Error, "P0 holds no weights");
  auto it = weights_->find(d.name);
  TRIAD_ENFORCE(it != weights_->end(), FormatError, "missing weight '" + d.name + "'");
  TRIAD_ENFORCE(it->second.shape() == d.dims, ShapeError, "weight '" + d.name + "' has the wrong shape");
  return share_private(ctx_, Role::P0, it->second);
}

RingTensor SecureBackend::matmul(const RingTensor& a, const RingTensor& b) { return porthos::matmul(ctx_, a, b); }

RingTensor SecureBackend::matadd(const RingTensor& a, const RingTensor& b) { return a + b; }

RingTensor SecureBackend::conv(const RingTensor& x, const RingTensor& f, const ir::Attrs& a) {
  auto [sh, sw] = strides_or(a, 1, 1);
  return conv2d(ctx_, x, f, sh, sw);
}

RingTensor SecureBackend::maxpool(const RingTensor& x, const ir::Attrs& a) {
  auto [sh, sw] = strides_or(a, a.pool[0], a.pool[1]);
  return porthos::maxpool(ctx_, x, a.pool[0], a.pool[1], sh, sw);
}

RingTensor SecureBackend::avgpool(const RingTensor& x, const ir::Attrs& a, int scale) {
  auto [sh, sw] = strides_or(a, a.pool[0], a.pool[1]);
  return porthos::avgpool(ctx_, x, a.pool[0], a.pool[1], sh, sw, scale);
}

RingTensor SecureBackend::relu(const RingTensor& x) { return porthos::relu(ctx_, x); }

RingTensor SecureBackend::argmax(const RingTensor& x) {
  return argmax_rows(ctx_, x.reshaped({1, static_cast<int64_t>(x.size())})).second;
}

RingTensor SecureBackend::fused_batchnorm(const RingTensor& a, const RingTensor& b, const RingTensor& c) {
  return porthos::fused_batchnorm(ctx_, a, b, c);
}

void SecureBackend::scaledown(RingTensor& a, int shift) { a = porthos::scaledown(ctx_, a, shift); }

RingTensor run_inference(ProtocolContext& ctx, const ir::LLILProgram& p, const Weights* weights,
                         const RingTensor* input, ir::ExecStats* stats) {
  SecureBackend backend(ctx, weights, input);
  RingTensor out = ir::execute(p, backend, stats);
  return reveal_to(ctx, Role::P1, out);
}

}  // namespace triad::porthos
