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

#include "triad/ir/ir.hpp"
#include "triad/ring/tensor.hpp"

namespace triad::ir {

using ring::RingTensor;

// The share-manipulating functions a backend supplies. Values are Z_{2^64}
// tensors: plaintext for the reference interpreter, a party's local share for
// MPC backends. Library functions never reach the backend.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual RingTensor load_input(const Decl& d) = 0;
  virtual RingTensor load_param(const Decl& d) = 0;

  virtual RingTensor matmul(const RingTensor& a, const RingTensor& b) = 0;
  virtual RingTensor matadd(const RingTensor& a, const RingTensor& b) = 0;
  // x: H x W x CI, f: FH x FW x CI x CO, VALID padding.
  virtual RingTensor conv(const RingTensor& x, const RingTensor& f, const Attrs& a) = 0;
  virtual RingTensor maxpool(const RingTensor& x, const Attrs& a) = 0;
  virtual RingTensor avgpool(const RingTensor& x, const Attrs& a, int scale) = 0;
  virtual RingTensor relu(const RingTensor& x) = 0;
  virtual RingTensor argmax(const RingTensor& x) = 0;
  virtual RingTensor fused_batchnorm(const RingTensor& a, const RingTensor& b,
                                     const RingTensor& c) = 0;
  virtual void scaledown(RingTensor& a, int shift) = 0;

  // Called before each statement.
  virtual void before_call(size_t /*index*/, const Call& /*c*/) {}
};

struct ExecStats {
  int64_t peak_resident_bytes = 0;
  int64_t buffers_freed = 0;
};

// Run an LLIL program statement by statement. Buffers are released according
// to the liveness free-after map; touching a released buffer throws.
RingTensor execute(const LLILProgram& p, Backend& backend, ExecStats* stats = nullptr);

// Library functions on a single ring tensor (shares or plaintext).
RingTensor run_library(const Call& c, const std::vector<const RingTensor*>& in,
                       const Shape& out_shape);

}  // namespace triad::ir
