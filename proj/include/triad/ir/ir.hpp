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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triad/ring/tensor.hpp"

namespace triad::ir {

using ring::Shape;

enum class OpKind : uint8_t {
  MatMul,
  MatAdd,
  Conv,
  MaxPool,
  AvgPool,
  ReLU,
  ArgMax,
  BatchNorm,       // HLIL only: x, gamma, beta, mean, variance
  FusedBatchNorm,  // LLIL only: A, B, C
  ScaleDown,       // LLIL only, in place
  Reshape,
  Pad,
  Transpose,
  Concat,
};

std::string_view op_name(OpKind k);
std::optional<OpKind> parse_op(std::string_view name);

// Share-manipulating functions the crypto backend must implement.
bool is_extern(OpKind k);
// Data movement executed locally on each share.
bool is_library(OpKind k);

struct Attrs {
  std::vector<int64_t> strides;  // Conv, pools: {sh, sw}
  std::string padding = "VALID";  // Conv: VALID or SAME
  std::vector<int64_t> pool;      // pools: {a, b}
  std::vector<int64_t> pads;      // Pad: {before0, after0, before1, after1, ...}
  std::vector<int64_t> perm;      // Transpose
  std::vector<int64_t> shape;     // Reshape
  int64_t axis = 0;               // Concat
  int64_t shift = 0;              // ScaleDown
  double epsilon = 1e-3;          // BatchNorm

  bool operator==(const Attrs&) const = default;
};

struct Call {
  OpKind op;
  std::vector<std::string> inputs;
  // ScaleDown rewrites inputs[0] in place and has an empty output.
  std::string output;
  Attrs attrs;

  bool operator==(const Call&) const = default;
};

enum class DeclKind : uint8_t { Input, Param, Temp };

struct Decl {
  std::string name;
  Shape dims;
  DeclKind kind = DeclKind::Temp;

  bool operator==(const Decl&) const = default;
};

// Shared representation of both IR levels. Declarations are ordered: input
// first, then parameters in first-use order, then temporaries in definition
// order.
struct Program {
  std::vector<Decl> decls;
  std::vector<Call> calls;
  std::string input;
  std::string output;

  const Decl* find(std::string_view name) const;
  Decl* find(std::string_view name);
  const Decl& at(std::string_view name) const;
  Decl& add_decl(Decl d);
  bool operator==(const Program&) const = default;
};

// Float tensors, statically shaped.
struct HLILProgram : Program {};

// Integer tensors at a single global scale.
struct LLILProgram : Program {
  int scale = 0;
};

// Output shape of `c` given its operand shapes; throws ShapeError on a
// mismatch.
Shape infer_shape(const Call& c, const std::vector<Shape>& in);

// Check every call's operands against its signature and (re)derive the
// declared shape of each temporary. Throws on use-before-def.
void type_check(Program& p);

// "xW = MatMul(x, W);" style listing.
std::string to_text(const Program& p, std::optional<int> scale_comment = std::nullopt);

// Conv geometry helpers. SAME padding follows the usual convention:
// total = max((ceil(n/s) - 1) * s + f - n, 0), split low/high with the extra
// cell at the high end.
struct SamePad {
  int64_t top, bottom, left, right;
};
SamePad same_padding(int64_t h, int64_t w, int64_t fh, int64_t fw, int64_t sh, int64_t sw);

}  // namespace triad::ir
