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

#include "triad/ir/passes.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "triad/error.hpp"

namespace triad::ir {

using ring::numel;

namespace {

std::map<std::string, int> use_counts(const Program& p) {
  std::map<std::string, int> uses;
  for (const auto& c : p.calls) {
    for (const auto& in : c.inputs) ++uses[in];
  }
  ++uses[p.output];
  return uses;
}

// Rebuild declarations in canonical order, keeping only referenced names.
template <class P>
void canonicalize_decls(P& p, const std::map<std::string, Shape>& extra = {}) {
  std::vector<Decl> old = std::move(p.decls);
  p.decls.clear();
  auto lookup = [&](const std::string& n) -> const Decl* {
    for (const auto& d : old) {
      if (d.name == n) return &d;
    }
    return nullptr;
  };
  std::set<std::string> seen;
  auto add = [&](const std::string& n, DeclKind k) {
    if (!seen.insert(n).second) return;
    if (const Decl* d = lookup(n)) {
      p.decls.push_back({n, d->dims, k});
    } else if (auto it = extra.find(n); it != extra.end()) {
      p.decls.push_back({n, it->second, k});
    } else if (k == DeclKind::Temp) {
      p.decls.push_back({n, {}, k});
    } else {
      throw FormatError("no declaration for '" + n + "'");
    }
  };
  if (!p.calls.empty()) add(p.input, DeclKind::Input);
  std::set<std::string> produced;
  for (const auto& c : p.calls) produced.insert(c.output);
  for (const auto& c : p.calls) {
    for (const auto& in : c.inputs) {
      if (produced.count(in) == 0 && in != p.input) add(in, DeclKind::Param);
    }
  }
  for (const auto& c : p.calls) {
    if (!c.output.empty()) add(c.output, DeclKind::Temp);
  }
  type_check(p);
}

}  // namespace

HLILProgram relu_maxpool_switch(const HLILProgram& p) {
  auto uses = use_counts(p);
  std::map<std::string, size_t> relu_at;
  for (size_t i = 0; i < p.calls.size(); ++i) {
    if (p.calls[i].op == OpKind::ReLU) relu_at[p.calls[i].output] = i;
  }
  std::set<size_t> dropped;
  std::vector<Call> calls;
  std::map<size_t, std::vector<Call>> replacement;
  for (size_t i = 0; i < p.calls.size(); ++i) {
    const Call& c = p.calls[i];
    if (c.op != OpKind::MaxPool) continue;
    auto it = relu_at.find(c.inputs[0]);
    if (it == relu_at.end() || uses[c.inputs[0]] != 1) continue;
    const Call& relu = p.calls[it->second];
    Call pool = c;
    pool.inputs = {relu.inputs[0]};
    pool.output = c.output + "/prerelu";
    Call act{OpKind::ReLU, {pool.output}, c.output, {}};
    dropped.insert(it->second);
    replacement[i] = {pool, act};
  }
  HLILProgram out;
  out.input = p.input;
  out.output = p.output;
  out.decls = p.decls;
  for (size_t i = 0; i < p.calls.size(); ++i) {
    if (dropped.count(i)) continue;
    if (auto r = replacement.find(i); r != replacement.end()) {
      out.calls.insert(out.calls.end(), r->second.begin(), r->second.end());
    } else {
      out.calls.push_back(p.calls[i]);
    }
  }
  canonicalize_decls(out);
  return out;
}

int64_t count_relu(const Program& p) {
  int64_t n = 0;
  for (const auto& c : p.calls) {
    if (c.op == OpKind::ReLU) n += numel(p.at(c.output).dims);
  }
  return n;
}

int64_t count_scaledown(const LLILProgram& p) {
  int64_t n = 0;
  for (const auto& c : p.calls) {
    if (c.op == OpKind::ScaleDown) n += numel(p.at(c.inputs[0]).dims);
  }
  return n;
}

Liveness liveness(const Program& p) {
  const size_t n = p.calls.size();
  std::map<std::string, size_t> def, last;
  for (size_t i = 0; i < n; ++i) {
    const Call& c = p.calls[i];
    for (const auto& in : c.inputs) {
      const Decl& d = p.at(in);
      if (def.count(in) == 0) {
        TRIAD_ENFORCE(d.kind != DeclKind::Temp, FormatError,
                      "'" + in + "' used before definition at statement " + std::to_string(i));
        def[in] = i;
      }
      last[in] = i;
    }
    if (!c.output.empty()) {
      TRIAD_ENFORCE(def.count(c.output) == 0, FormatError, "'" + c.output + "' defined twice");
      def[c.output] = i;
      last[c.output] = std::max(last[c.output], i);
    }
  }
  Liveness L;
  L.live.resize(n);
  L.free_after.resize(n);
  if (n == 0) return L;
  TRIAD_ENFORCE(def.count(p.output) != 0, FormatError, "output never defined");
  last[p.output] = n - 1;
  std::vector<int64_t> bytes_at(n, 0);
  for (const auto& [name, d0] : def) {
    const int64_t bytes = 8 * numel(p.at(name).dims);
    L.total_bytes += bytes;
    const size_t d1 = last[name];
    for (size_t i = d0; i <= d1; ++i) {
      L.live[i].push_back(name);
      bytes_at[i] += bytes;
    }
    if (name != p.output) L.free_after[d1].push_back(name);
  }
  L.peak_bytes = *std::max_element(bytes_at.begin(), bytes_at.end());
  return L;
}

Lowered lower(const HLILProgram& p, int scale) {
  TRIAD_ENFORCE(scale >= 0 && scale <= 63, FormatError, "scale must lie in [0, 63]");
  LLILProgram out;
  out.scale = scale;
  out.input = p.input;
  out.output = p.output;
  out.decls = p.decls;
  std::map<std::string, Shape> extra;
  auto scaledown = [&](const std::string& name) {
    Call sd{OpKind::ScaleDown, {name}, "", {}};
    sd.attrs.shift = scale;
    out.calls.push_back(sd);
  };
  for (const auto& c : p.calls) {
    switch (c.op) {
      case OpKind::MatMul:
        out.calls.push_back(c);
        scaledown(c.output);
        break;
      case OpKind::Conv: {
        Call conv = c;
        if (c.attrs.padding == "SAME") {
          const Shape& x = p.at(c.inputs[0]).dims;
          const Shape& f = p.at(c.inputs[1]).dims;
          const int64_t sh = c.attrs.strides.size() >= 2 ? c.attrs.strides[0] : 1;
          const int64_t sw = c.attrs.strides.size() >= 2 ? c.attrs.strides[1] : 1;
          SamePad sp = same_padding(x[0], x[1], f[0], f[1], sh, sw);
          if (sp.top || sp.bottom || sp.left || sp.right) {
            Call pad{OpKind::Pad, {c.inputs[0]}, c.output + "/padded", {}};
            pad.attrs.pads = {sp.top, sp.bottom, sp.left, sp.right, 0, 0};
            out.calls.push_back(pad);
            conv.inputs[0] = pad.output;
          }
          conv.attrs.padding = "VALID";
        }
        out.calls.push_back(conv);
        scaledown(c.output);
        break;
      }
      case OpKind::BatchNorm: {
        const Shape ch{p.at(c.inputs[0]).dims.back()};
        Call fbn{OpKind::FusedBatchNorm, {c.inputs[0], c.output + "/B", c.output + "/C"},
                 c.output, {}};
        extra[fbn.inputs[1]] = ch;
        extra[fbn.inputs[2]] = ch;
        out.calls.push_back(fbn);
        scaledown(c.output);
        break;
      }
      case OpKind::FusedBatchNorm:
      case OpKind::ScaleDown:
        throw FormatError(std::string(op_name(c.op)) + " cannot appear in HLIL");
      default:
        out.calls.push_back(c);
        break;
    }
  }
  canonicalize_decls(out, extra);
  Lowered l;
  l.trace = make_trace(out);
  l.llil = std::move(out);
  return l;
}

BackendCallTrace make_trace(const LLILProgram& p) {
  BackendCallTrace t;
  for (const auto& c : p.calls) t.push_back({c.op, c.inputs, c.output, c.attrs});
  return t;
}

std::string trace_to_text(const BackendCallTrace& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i) {
    const auto& e = t[i];
    os << i << ": " << op_name(e.op) << (is_library(e.op) ? " [local]" : "") << " (";
    for (size_t k = 0; k < e.operands.size(); ++k) os << (k ? ", " : "") << e.operands[k];
    os << ")";
    if (!e.output.empty()) os << " -> " << e.output;
    if (e.op == OpKind::ScaleDown) os << " shift=" << e.params.shift;
    if (!e.params.pool.empty()) os << " pool=" << e.params.pool[0] << "x" << e.params.pool[1];
    if (!e.params.strides.empty()) {
      os << " strides=" << e.params.strides[0] << "x" << e.params.strides[1];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace triad::ir
