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
#include <map>
#include <string>
#include <vector>

#include "triad/ir/executor.hpp"
#include "triad/ir/model.hpp"
#include "triad/ir/passes.hpp"

namespace triad::fixedpoint {

using ir::FloatModel;
using ir::FloatTensor;
using ring::RingTensor;
using ring::Shape;

struct FixedConfig {
  int bits = 64;
  int scale = 0;
};

struct RhoResult {
  uint64_t value;  // two's complement in Z_{2^64}
  bool overflow;   // floor(r * 2^s) outside [-2^63, 2^63)
};

// floor(r * 2^s) computed exactly from the float32 value of r.
RhoResult rho_checked(float r, int s);
inline uint64_t rho(float r, int s) { return rho_checked(r, s).value; }

RingTensor quantize(const FloatTensor& t, int s, int64_t* overflows = nullptr);

struct FixedModel {
  ir::LLILProgram graph;
  ir::BackendCallTrace trace;
  std::map<std::string, RingTensor> weights;
  FixedConfig config;
  int64_t overflowed_weights = 0;
};

// Lower the float graph at scale s and map every parameter through rho.
// BatchNorm parameters are folded into B = rho_s(gamma / sqrt(var + eps)) and
// C = rho_2s(beta - gamma * mean / sqrt(var + eps)).
FixedModel quantize_model(const FloatModel& m, int s);

// Reference plaintext evaluation of the LLIL program.
RingTensor fixed_interpret(const FixedModel& m, const RingTensor& input);

// Float32 evaluation of the HLIL program.
FloatTensor float_interpret(const FloatModel& m, const FloatTensor& input);

// Plaintext backend used by fixed_interpret; exposed so other tools can wrap
// it.
class PlainBackend : public ir::Backend {
 public:
  PlainBackend(const FixedModel& m, RingTensor input) : m_(m), input_(std::move(input)) {}

  RingTensor load_input(const ir::Decl& d) override;
  RingTensor load_param(const ir::Decl& d) override;
  RingTensor matmul(const RingTensor& a, const RingTensor& b) override;
  RingTensor matadd(const RingTensor& a, const RingTensor& b) override;
  RingTensor conv(const RingTensor& x, const RingTensor& f, const ir::Attrs& a) override;
  RingTensor maxpool(const RingTensor& x, const ir::Attrs& a) override;
  RingTensor avgpool(const RingTensor& x, const ir::Attrs& a, int scale) override;
  RingTensor relu(const RingTensor& x) override;
  RingTensor argmax(const RingTensor& x) override;
  RingTensor fused_batchnorm(const RingTensor& a, const RingTensor& b, const RingTensor& c) override;
  void scaledown(RingTensor& a, int shift) override;

 private:
  const FixedModel& m_;
  RingTensor input_;
};

// Plaintext conv helper shared with tests: VALID, strided, HWC.
RingTensor conv_plain(const RingTensor& x, const RingTensor& f, int64_t sh, int64_t sw);

struct LabeledSet {
  Shape image_shape;
  std::vector<FloatTensor> images;
  std::vector<int64_t> labels;
};

// Index predicted by a model output: the ArgMax value for {1} outputs,
// otherwise the position of the largest signed entry (earliest on ties).
int64_t predicted_class(const RingTensor& out);
int64_t predicted_class(const FloatTensor& out);

double fixed_accuracy(const FixedModel& m, const LabeledSet& data);
double float_accuracy(const FloatModel& m, const LabeledSet& data);

struct SweepResult {
  int best_scale = 0;
  std::vector<double> accuracy;  // indexed by s, 64 entries
};

// Top-1 accuracy at every s in [0, 63]; ties go to the smallest s.
SweepResult scale_sweep(const FloatModel& m, const LabeledSet& validation);

}  // namespace triad::fixedpoint
