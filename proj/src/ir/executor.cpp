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

#include "triad/ir/executor.hpp"

#include <map>
#include <set>

#include "triad/error.hpp"
#include "triad/ir/library.hpp"
#include "triad/ir/passes.hpp"

namespace triad::ir {

RingTensor run_library(const Call& c, const std::vector<const RingTensor*>& in,
                       const Shape& out_shape) {
  const RingTensor& x = *in.at(0);
  std::vector<uint64_t> data;
  switch (c.op) {
    case OpKind::Reshape:
      return x.reshaped(out_shape);
    case OpKind::Pad:
      data = lib::pad<uint64_t>(x.data(), x.shape(), c.attrs.pads);
      break;
    case OpKind::Transpose:
      data = lib::transpose<uint64_t>(x.data(), x.shape(), c.attrs.perm);
      break;
    case OpKind::Concat: {
      std::vector<std::span<const uint64_t>> parts;
      std::vector<Shape> shapes;
      for (const auto* t : in) {
        parts.push_back(t->data());
        shapes.push_back(t->shape());
      }
      data = lib::concat<uint64_t>(parts, shapes, c.attrs.axis);
      break;
    }
    default:
      throw FormatError(std::string(op_name(c.op)) + " is not a library function");
  }
  return RingTensor(x.ring(), out_shape, std::move(data));
}

RingTensor execute(const LLILProgram& p, Backend& backend, ExecStats* stats) {
  const Liveness live = liveness(p);
  std::map<std::string, RingTensor> env;
  std::set<std::string> freed;
  int64_t resident = 0, peak = 0, nfreed = 0;

  auto get = [&](const std::string& name) -> RingTensor& {
    TRIAD_ENFORCE(freed.count(name) == 0, Error, "use of released buffer '" + name + "'");
    auto it = env.find(name);
    if (it != env.end()) return it->second;
    const Decl& d = p.at(name);
    RingTensor v;
    if (d.kind == DeclKind::Input) {
      v = backend.load_input(d);
    } else if (d.kind == DeclKind::Param) {
      v = backend.load_param(d);
    } else {
      throw FormatError("'" + name + "' used before definition");
    }
    TRIAD_ENFORCE(v.shape() == d.dims, ShapeError, "backend returned wrong shape for '" + name + "'");
    resident += 8 * static_cast<int64_t>(v.size());
    return env.emplace(name, std::move(v)).first->second;
  };

  for (size_t i = 0; i < p.calls.size(); ++i) {
    const Call& c = p.calls[i];
    backend.before_call(i, c);
    std::vector<RingTensor*> in;
    for (const auto& name : c.inputs) in.push_back(&get(name));
    peak = std::max(peak, resident);
    RingTensor out;
    switch (c.op) {
      case OpKind::MatMul:
        out = backend.matmul(*in[0], *in[1]);
        break;
      case OpKind::MatAdd:
        out = backend.matadd(*in[0], *in[1]);
        break;
      case OpKind::Conv:
        out = backend.conv(*in[0], *in[1], c.attrs);
        break;
      case OpKind::MaxPool:
        out = backend.maxpool(*in[0], c.attrs);
        break;
      case OpKind::AvgPool:
        out = backend.avgpool(*in[0], c.attrs, p.scale);
        break;
      case OpKind::ReLU:
        out = backend.relu(*in[0]);
        break;
      case OpKind::ArgMax:
        out = backend.argmax(*in[0]);
        break;
      case OpKind::FusedBatchNorm:
        out = backend.fused_batchnorm(*in[0], *in[1], *in[2]);
        break;
      case OpKind::ScaleDown:
        backend.scaledown(*in[0], static_cast<int>(c.attrs.shift));
        break;
      case OpKind::Reshape:
      case OpKind::Pad:
      case OpKind::Transpose:
      case OpKind::Concat: {
        std::vector<const RingTensor*> cin(in.begin(), in.end());
        out = run_library(c, cin, p.at(c.output).dims);
        break;
      }
      case OpKind::BatchNorm:
        throw FormatError("BatchNorm must be lowered before execution");
    }
    if (!c.output.empty()) {
      TRIAD_ENFORCE(out.shape() == p.at(c.output).dims, ShapeError,
                    std::string(op_name(c.op)) + " produced " + ring::shape_str(out.shape()) +
                        " for '" + c.output + "'");
      resident += 8 * static_cast<int64_t>(out.size());
      env[c.output] = std::move(out);
    }
    peak = std::max(peak, resident);
    for (const auto& name : live.free_after[i]) {
      auto it = env.find(name);
      if (it == env.end()) continue;
      resident -= 8 * static_cast<int64_t>(it->second.size());
      env.erase(it);
      freed.insert(name);
      ++nfreed;
    }
  }
  if (stats) {
    stats->peak_resident_bytes = peak;
    stats->buffers_freed = nfreed;
  }
  if (p.calls.empty()) return {};
  return get(p.output);
}

}  // namespace triad::ir
