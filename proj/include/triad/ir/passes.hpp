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
#include <string>
#include <vector>

#include "triad/ir/ir.hpp"

namespace triad::ir {

// Commute MaxPool(a, b, ReLU(A)) into ReLU(MaxPool(a, b, A)) whenever the
// ReLU result feeds only that MaxPool. The pooled pre-activation is named
// "<maxpool output>/prerelu"; the final name is unchanged.
HLILProgram relu_maxpool_switch(const HLILProgram& p);

// Number of ReLU elements evaluated by the program.
int64_t count_relu(const Program& p);

// Sum of element counts over all ScaleDown calls.
int64_t count_scaledown(const LLILProgram& p);

struct Liveness {
  // live[i]: tensors holding a buffer while statement i executes.
  std::vector<std::vector<std::string>> live;
  // free_after[i]: buffers that can be released once statement i is done.
  std::vector<std::vector<std::string>> free_after;
  int64_t peak_bytes = 0;
  int64_t total_bytes = 0;
};

// Inputs and parameters are materialized at their first use; 8 bytes per
// element. The program output stays live to the end.
Liveness liveness(const Program& p);

struct TraceEntry {
  OpKind op;
  std::vector<std::string> operands;
  std::string output;
  Attrs params;
};
using BackendCallTrace = std::vector<TraceEntry>;

struct Lowered {
  LLILProgram llil;
  BackendCallTrace trace;
};

// HLIL -> LLIL at scale s: a ScaleDown(·, s) after every MatMul, Conv and
// FusedBatchNorm, none after MatAdd; BatchNorm becomes FusedBatchNorm over
// folded parameters "<out>/B" and "<out>/C"; SAME convolutions become an
// explicit Pad then a VALID Conv.
Lowered lower(const HLILProgram& p, int scale);

BackendCallTrace make_trace(const LLILProgram& p);
std::string trace_to_text(const BackendCallTrace& t);

}  // namespace triad::ir
