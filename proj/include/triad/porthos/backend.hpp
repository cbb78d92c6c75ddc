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

#include <map>
#include <string>

#include "triad/ir/executor.hpp"
#include "triad/porthos/context.hpp"

namespace triad::porthos {

using Weights = std::map<std::string, RingTensor>;

// Executes LLIL on secret shares. P0 supplies the weights, P1 the input;
// the other parties may pass nullptr.
class SecureBackend : public ir::Backend {
 public:
  SecureBackend(ProtocolContext& ctx, const Weights* weights, const RingTensor* input)
      : ctx_(ctx), weights_(weights), input_(input) {}

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
  ProtocolContext& ctx_;
  const Weights* weights_;
  const RingTensor* input_;
};

// Run `p` on shares and open the result to P1. P1 returns the plaintext
// output, P0 its share, P2 a zero placeholder.
RingTensor run_inference(ProtocolContext& ctx, const ir::LLILProgram& p, const Weights* weights,
                         const RingTensor* input, ir::ExecStats* stats = nullptr);

}  // namespace triad::porthos
