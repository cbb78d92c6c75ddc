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

#include "triad/ir/ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "triad/error.hpp"

namespace triad::ir {

using ring::numel;
using ring::shape_str;

namespace {

struct OpEntry {
  OpKind kind;
  std::string_view name;
};

constexpr OpEntry kOps[] = {
    {OpKind::MatMul, "MatMul"},       {OpKind::MatAdd, "MatAdd"},
    {OpKind::Conv, "Conv"},           {OpKind::MaxPool, "MaxPool"},
    {OpKind::AvgPool, "AvgPool"},     {OpKind::ReLU, "ReLU"},
    {OpKind::ArgMax, "ArgMax"},       {OpKind::BatchNorm, "BatchNorm"},
    {OpKind::FusedBatchNorm, "FusedBatchNorm"}, {OpKind::ScaleDown, "ScaleDown"},
    {OpKind::Reshape, "Reshape"},     {OpKind::Pad, "Pad"},
    {OpKind::Transpose, "Transpose"}, {OpKind::Concat, "Concat"},
};

[[noreturn]] void shape_fail(const Call& c, const std::string& why) {
  throw ShapeError(std::string(op_name(c.op)) + " -> " + c.output + ": " + why);
}

void need_rank(const Call& c, const Shape& s, size_t rank, const char* what) {
  if (s.size() != rank) {
    shape_fail(c, std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
                      shape_str(s));
  }
}

std::pair<int64_t, int64_t> pair_or(const std::vector<int64_t>& v, int64_t a, int64_t b) {
  if (v.size() >= 2) return {v[0], v[1]};
  return {a, b};
}

}  // namespace

std::string_view op_name(OpKind k) {
  for (const auto& e : kOps) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

std::optional<OpKind> parse_op(std::string_view name) {
  for (const auto& e : kOps) {
    if (e.name == name) return e.kind;
  }
  if (name == "Relu") return OpKind::ReLU;
  if (name == "Conv2D" || name == "Conv2d") return OpKind::Conv;
  if (name == "Add" || name == "BiasAdd") return OpKind::MatAdd;
  if (name == "AvgPool2D") return OpKind::AvgPool;
  if (name == "MaxPool2D") return OpKind::MaxPool;
  return std::nullopt;
}

bool is_extern(OpKind k) {
  switch (k) {
    case OpKind::MatMul:
    case OpKind::MatAdd:
    case OpKind::Conv:
    case OpKind::MaxPool:
    case OpKind::AvgPool:
    case OpKind::ReLU:
    case OpKind::ArgMax:
    case OpKind::FusedBatchNorm:
    case OpKind::ScaleDown:
      return true;
    default:
      return false;
  }
}

bool is_library(OpKind k) {
  return k == OpKind::Reshape || k == OpKind::Pad || k == OpKind::Transpose ||
         k == OpKind::Concat;
}

const Decl* Program::find(std::string_view name) const {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

Decl* Program::find(std::string_view name) {
  for (auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const Decl& Program::at(std::string_view name) const {
  const Decl* d = find(name);
  TRIAD_ENFORCE(d != nullptr, FormatError, "undeclared tensor '" + std::string(name) + "'");
  return *d;
}

Decl& Program::add_decl(Decl d) {
  TRIAD_ENFORCE(find(d.name) == nullptr, FormatError, "duplicate declaration '" + d.name + "'");
  decls.push_back(std::move(d));
  return decls.back();
}

SamePad same_padding(int64_t h, int64_t w, int64_t fh, int64_t fw, int64_t sh, int64_t sw) {
  auto total = [](int64_t n, int64_t f, int64_t s) {
    int64_t out = (n + s - 1) / s;
    return std::max<int64_t>((out - 1) * s + f - n, 0);
  };
  int64_t th = total(h, fh, sh), tw = total(w, fw, sw);
  return {th / 2, th - th / 2, tw / 2, tw - tw / 2};
}

Shape infer_shape(const Call& c, const std::vector<Shape>& in) {
  auto need_args = [&](size_t n) {
    if (in.size() != n) {
      shape_fail(c, "expects " + std::to_string(n) + " operands, got " + std::to_string(in.size()));
    }
  };
  switch (c.op) {
    case OpKind::MatMul: {
      need_args(2);
      need_rank(c, in[0], 2, "A");
      need_rank(c, in[1], 2, "B");
      if (in[0][1] != in[1][0]) {
        shape_fail(c, "inner dimensions " + shape_str(in[0]) + " x " + shape_str(in[1]));
      }
      return {in[0][0], in[1][1]};
    }
    case OpKind::MatAdd: {
      need_args(2);
      if (in[0] != in[1]) shape_fail(c, "operand shapes " + shape_str(in[0]) + ", " + shape_str(in[1]));
      return in[0];
    }
    case OpKind::Conv: {
      need_args(2);
      need_rank(c, in[0], 3, "input");
      need_rank(c, in[1], 4, "filter");
      const Shape& x = in[0];
      const Shape& f = in[1];
      if (x[2] != f[2]) shape_fail(c, "input channels " + shape_str(x) + " vs filter " + shape_str(f));
      auto [sh, sw] = pair_or(c.attrs.strides, 1, 1);
      if (sh < 1 || sw < 1) shape_fail(c, "non-positive stride");
      if (c.attrs.padding == "SAME") {
        return {(x[0] + sh - 1) / sh, (x[1] + sw - 1) / sw, f[3]};
      }
      if (c.attrs.padding != "VALID") shape_fail(c, "unknown padding " + c.attrs.padding);
      if (x[0] < f[0] || x[1] < f[1]) shape_fail(c, "filter larger than input");
      return {(x[0] - f[0]) / sh + 1, (x[1] - f[1]) / sw + 1, f[3]};
    }
    case OpKind::MaxPool:
    case OpKind::AvgPool: {
      need_args(1);
      need_rank(c, in[0], 3, "input");
      if (c.attrs.pool.size() != 2) shape_fail(c, "pool must be [a, b]");
      auto [a, b] = pair_or(c.attrs.pool, 1, 1);
      auto [sh, sw] = pair_or(c.attrs.strides, a, b);
      if (a < 1 || b < 1 || sh < 1 || sw < 1) shape_fail(c, "non-positive window or stride");
      const Shape& x = in[0];
      if (x[0] < a || x[1] < b) shape_fail(c, "window larger than input");
      return {(x[0] - a) / sh + 1, (x[1] - b) / sw + 1, x[2]};
    }
    case OpKind::ReLU:
      need_args(1);
      return in[0];
    case OpKind::ArgMax:
      need_args(1);
      if (numel(in[0]) < 1) shape_fail(c, "empty operand");
      return {1};
    case OpKind::BatchNorm: {
      need_args(5);
      if (in[0].empty()) shape_fail(c, "scalar input");
      Shape ch{in[0].back()};
      for (size_t i = 1; i < 5; ++i) {
        if (in[i] != ch) shape_fail(c, "parameter " + std::to_string(i) + " must be " + shape_str(ch));
      }
      return in[0];
    }
    case OpKind::FusedBatchNorm: {
      need_args(3);
      if (in[0].empty()) shape_fail(c, "scalar input");
      Shape ch{in[0].back()};
      if (in[1] != ch || in[2] != ch) shape_fail(c, "B and C must be " + shape_str(ch));
      return in[0];
    }
    case OpKind::ScaleDown:
      need_args(1);
      if (c.attrs.shift < 0 || c.attrs.shift > 63) shape_fail(c, "shift out of range");
      return in[0];
    case OpKind::Reshape: {
      need_args(1);
      Shape out = c.attrs.shape;
      int64_t known = 1;
      int wild = -1;
      for (size_t i = 0; i < out.size(); ++i) {
        if (out[i] == -1) {
          if (wild >= 0) shape_fail(c, "more than one -1");
          wild = static_cast<int>(i);
        } else if (out[i] < 0) {
          shape_fail(c, "negative dimension");
        } else {
          known *= out[i];
        }
      }
      const int64_t n = numel(in[0]);
      if (wild >= 0) {
        if (known == 0 || n % known != 0) shape_fail(c, "cannot infer -1");
        out[static_cast<size_t>(wild)] = n / known;
      }
      if (numel(out) != n) shape_fail(c, shape_str(in[0]) + " to " + shape_str(out));
      return out;
    }
    case OpKind::Pad: {
      need_args(1);
      if (c.attrs.pads.size() != 2 * in[0].size()) shape_fail(c, "pads must have 2*rank entries");
      Shape out = in[0];
      for (size_t i = 0; i < out.size(); ++i) {
        int64_t lo = c.attrs.pads[2 * i], hi = c.attrs.pads[2 * i + 1];
        if (lo < 0 || hi < 0) shape_fail(c, "negative padding");
        out[i] += lo + hi;
      }
      return out;
    }
    case OpKind::Transpose: {
      need_args(1);
      const auto& perm = c.attrs.perm;
      if (perm.size() != in[0].size()) shape_fail(c, "perm rank mismatch");
      std::vector<int64_t> sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != static_cast<int64_t>(i)) shape_fail(c, "perm is not a permutation");
      }
      Shape out(perm.size());
      for (size_t i = 0; i < perm.size(); ++i) out[i] = in[0][static_cast<size_t>(perm[i])];
      return out;
    }
    case OpKind::Concat: {
      if (in.empty()) shape_fail(c, "no operands");
      const size_t rank = in[0].size();
      const int64_t axis = c.attrs.axis;
      if (axis < 0 || axis >= static_cast<int64_t>(rank)) shape_fail(c, "axis out of range");
      Shape out = in[0];
      for (size_t k = 1; k < in.size(); ++k) {
        if (in[k].size() != rank) shape_fail(c, "rank mismatch");
        for (size_t i = 0; i < rank; ++i) {
          if (static_cast<int64_t>(i) == axis) continue;
          if (in[k][i] != out[i]) shape_fail(c, "non-axis dimension mismatch");
        }
        out[static_cast<size_t>(axis)] += in[k][static_cast<size_t>(axis)];
      }
      return out;
    }
  }
  shape_fail(c, "unsupported op");
}

void type_check(Program& p) {
  std::set<std::string> defined;
  for (const auto& d : p.decls) {
    if (d.kind != DeclKind::Temp) defined.insert(d.name);
  }
  TRIAD_ENFORCE(p.calls.empty() || p.find(p.input) != nullptr, FormatError,
                "input '" + p.input + "' is not declared");
  for (const auto& c : p.calls) {
    std::vector<Shape> in;
    for (const auto& name : c.inputs) {
      TRIAD_ENFORCE(defined.count(name) != 0, FormatError,
                    std::string(op_name(c.op)) + " uses '" + name + "' before definition");
      in.push_back(p.at(name).dims);
    }
    Shape out = infer_shape(c, in);
    if (c.op == OpKind::ScaleDown) continue;
    TRIAD_ENFORCE(!c.output.empty(), FormatError, std::string(op_name(c.op)) + " has no output");
    TRIAD_ENFORCE(defined.count(c.output) == 0, FormatError,
                  "'" + c.output + "' is assigned more than once");
    if (Decl* d = p.find(c.output)) {
      TRIAD_ENFORCE(d->kind == DeclKind::Temp, FormatError,
                    "'" + c.output + "' overwrites an input or parameter");
      TRIAD_ENFORCE(d->dims.empty() || d->dims == out, ShapeError,
                    "'" + c.output + "' declared " + shape_str(d->dims) + " but computes " +
                        shape_str(out));
      d->dims = out;
    } else {
      p.add_decl({c.output, out, DeclKind::Temp});
    }
    defined.insert(c.output);
  }
  TRIAD_ENFORCE(p.calls.empty() || defined.count(p.output) != 0, FormatError,
                "output '" + p.output + "' is never defined");
}

std::string to_text(const Program& p, std::optional<int> scale_comment) {
  std::ostringstream os;
  if (scale_comment) os << "// scale s = " << *scale_comment << "\n";
  for (const auto& c : p.calls) {
    if (c.op == OpKind::ScaleDown) {
      os << "ScaleDown(" << c.inputs[0] << ", " << c.attrs.shift << ");\n";
      continue;
    }
    os << c.output << " = " << op_name(c.op) << "(";
    bool first = true;
    auto arg = [&](const std::string& s) {
      if (!first) os << ", ";
      os << s;
      first = false;
    };
    if (c.op == OpKind::MaxPool || c.op == OpKind::AvgPool) {
      arg(std::to_string(c.attrs.pool[0]));
      arg(std::to_string(c.attrs.pool[1]));
    }
    for (const auto& in : c.inputs) arg(in);
    os << ");\n";
  }
  if (!p.output.empty()) os << "output(" << p.output << ");\n";
  return os.str();
}

}  // namespace triad::ir
