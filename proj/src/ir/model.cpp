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

#include "triad/ir/model.hpp"

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "triad/error.hpp"

namespace triad::ir {

using json = nlohmann::json;
using ring::numel;
using ring::shape_str;

namespace {

Attrs attrs_from_json(const json& j) {
  Attrs a;
  if (j.is_null()) return a;
  TRIAD_ENFORCE(j.is_object(), FormatError, "attrs must be an object");
  if (j.contains("strides")) a.strides = j["strides"].get<std::vector<int64_t>>();
  if (j.contains("padding")) a.padding = j["padding"].get<std::string>();
  if (j.contains("pool")) a.pool = j["pool"].get<std::vector<int64_t>>();
  if (j.contains("pads")) a.pads = j["pads"].get<std::vector<int64_t>>();
  if (j.contains("perm")) a.perm = j["perm"].get<std::vector<int64_t>>();
  if (j.contains("shape")) a.shape = j["shape"].get<std::vector<int64_t>>();
  if (j.contains("axis")) a.axis = j["axis"].get<int64_t>();
  if (j.contains("shift")) a.shift = j["shift"].get<int64_t>();
  if (j.contains("epsilon")) a.epsilon = j["epsilon"].get<double>();
  return a;
}

json attrs_to_json(const Call& c) {
  const Attrs& a = c.attrs;
  json j = json::object();
  if (!a.strides.empty()) j["strides"] = a.strides;
  if (c.op == OpKind::Conv) j["padding"] = a.padding;
  if (!a.pool.empty()) j["pool"] = a.pool;
  if (!a.pads.empty()) j["pads"] = a.pads;
  if (!a.perm.empty()) j["perm"] = a.perm;
  if (c.op == OpKind::Reshape) j["shape"] = a.shape;
  if (c.op == OpKind::Concat) j["axis"] = a.axis;
  if (c.op == OpKind::ScaleDown) j["shift"] = a.shift;
  if (c.op == OpKind::BatchNorm) j["epsilon"] = a.epsilon;
  return j;
}

uint32_t read_u32(const std::vector<uint8_t>& b, size_t& pos) {
  TRIAD_ENFORCE(pos + 4 <= b.size(), FormatError, "weights file truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

FloatTensor tile_last_axis(const FloatTensor& bias, const Shape& target) {
  FloatTensor t{target, std::vector<float>(static_cast<size_t>(numel(target)))};
  const size_t n = bias.data.size();
  for (size_t i = 0; i < t.data.size(); ++i) t.data[i] = bias.data[i % n];
  return t;
}

}  // namespace

HLILProgram parse_graph(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("graph JSON: ") + e.what());
  }
  HLILProgram p;
  try {
    if (j.contains("tensors")) {
      for (const auto& t : j["tensors"]) {
        Decl d{t.at("name").get<std::string>(), t.at("dims").get<Shape>(), DeclKind::Temp};
        p.add_decl(std::move(d));
      }
    }
    if (j.contains("nodes")) {
      for (const auto& n : j["nodes"]) {
        const std::string op = n.at("op").get<std::string>();
        auto kind = parse_op(op);
        TRIAD_ENFORCE(kind.has_value(), FormatError, "unknown node kind '" + op + "'");
        TRIAD_ENFORCE(*kind != OpKind::ScaleDown && *kind != OpKind::FusedBatchNorm, FormatError,
                      "'" + op + "' is not a float-level node");
        Call c{*kind, n.at("inputs").get<std::vector<std::string>>(),
               n.at("output").get<std::string>(),
               attrs_from_json(n.contains("attrs") ? n["attrs"] : json())};
        p.calls.push_back(std::move(c));
      }
    }
    p.input = j.value("input", "");
    p.output = j.value("output", "");
  } catch (const json::exception& e) {
    throw FormatError(std::string("graph JSON: ") + e.what());
  }
  return p;
}

std::string graph_to_json(const Program& p) {
  json j;
  j["tensors"] = json::array();
  for (const auto& d : p.decls) j["tensors"].push_back({{"name", d.name}, {"dims", d.dims}});
  j["nodes"] = json::array();
  for (const auto& c : p.calls) {
    j["nodes"].push_back({{"op", std::string(op_name(c.op))},
                          {"inputs", c.inputs},
                          {"output", c.output},
                          {"attrs", attrs_to_json(c)}});
  }
  j["input"] = p.input;
  j["output"] = p.output;
  return j.dump(1);
}

WeightMap parse_weights(const std::vector<uint8_t>& bytes) {
  WeightMap w;
  size_t pos = 0;
  while (pos < bytes.size()) {
    uint32_t len = read_u32(bytes, pos);
    TRIAD_ENFORCE(pos + len <= bytes.size(), FormatError, "weights file truncated in name");
    std::string name(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    uint32_t rank = read_u32(bytes, pos);
    FloatTensor t;
    for (uint32_t i = 0; i < rank; ++i) t.shape.push_back(read_u32(bytes, pos));
    const size_t n = static_cast<size_t>(numel(t.shape));
    TRIAD_ENFORCE(pos + 4 * n <= bytes.size(), FormatError,
                  "weights file truncated in '" + name + "'");
    t.data.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t raw = read_u32(bytes, pos);
      std::memcpy(&t.data[i], &raw, 4);
    }
    TRIAD_ENFORCE(w.emplace(name, std::move(t)).second, FormatError,
                  "duplicate weight '" + name + "'");
  }
  return w;
}

std::vector<uint8_t> weights_to_bytes(const WeightMap& w) {
  std::vector<uint8_t> b;
  for (const auto& [name, t] : w) {
    put_u32(b, static_cast<uint32_t>(name.size()));
    b.insert(b.end(), name.begin(), name.end());
    put_u32(b, static_cast<uint32_t>(t.shape.size()));
    for (int64_t d : t.shape) put_u32(b, static_cast<uint32_t>(d));
    for (float f : t.data) {
      uint32_t raw;
      std::memcpy(&raw, &f, 4);
      put_u32(b, raw);
    }
  }
  return b;
}

FloatModel make_model(HLILProgram graph, WeightMap weights) {
  FloatModel m;
  m.weights = std::move(weights);
  std::map<std::string, Shape> original;
  for (const auto& [name, t] : m.weights) original[name] = t.shape;
  HLILProgram& g = graph;

  // Re-declare in canonical order: input, parameters, temporaries.
  std::map<std::string, Shape> declared;
  for (const auto& d : g.decls) declared[d.name] = d.dims;
  HLILProgram out;
  out.input = g.input;
  out.output = g.output;
  if (!g.calls.empty()) {
    TRIAD_ENFORCE(declared.count(g.input) != 0, FormatError,
                  "input '" + g.input + "' has no declared dims");
    TRIAD_ENFORCE(m.weights.count(g.input) == 0, FormatError, "input has a weight entry");
    out.add_decl({g.input, declared[g.input], DeclKind::Input});
  }
  std::set<std::string> produced;
  for (const auto& c : g.calls) produced.insert(c.output);

  auto ensure_param = [&](const std::string& name) {
    if (out.find(name) != nullptr || produced.count(name) != 0) return;
    auto it = m.weights.find(name);
    TRIAD_ENFORCE(it != m.weights.end(), FormatError, "dangling weight reference '" + name + "'");
    auto d = declared.find(name);
    auto o = original.find(name);
    const Shape& file_shape = o != original.end() ? o->second : it->second.shape;
    TRIAD_ENFORCE(d == declared.end() || d->second == file_shape, ShapeError,
                  "weight '" + name + "' is " + shape_str(file_shape) + " but declared " +
                      shape_str(d == declared.end() ? Shape{} : d->second));
    out.add_decl({name, it->second.shape, DeclKind::Param});
  };

  // Bias tiling targets per rank-1 parameter.
  std::map<std::string, std::set<Shape>> bcast_targets;
  std::map<std::string, int> plain_uses;
  std::map<std::string, Shape> shapes;
  if (!g.calls.empty()) shapes[g.input] = declared[g.input];

  std::vector<Call> calls = g.calls;
  for (auto& c : calls) {
    std::vector<Shape> in;
    for (const auto& name : c.inputs) {
      if (shapes.count(name) == 0) {
        auto it = m.weights.find(name);
        TRIAD_ENFORCE(it != m.weights.end(), FormatError,
                      std::string(op_name(c.op)) + " uses undefined tensor '" + name + "'");
        shapes[name] = it->second.shape;
      }
      in.push_back(shapes[name]);
    }
    bool is_bcast = false;
    if (c.op == OpKind::MatAdd && in.size() == 2 && in[1].size() == 1 && in[0].size() > 1 &&
        in[0].back() == in[1][0] && m.weights.count(c.inputs[1]) != 0) {
      bcast_targets[c.inputs[1]].insert(in[0]);
      in[1] = in[0];
      is_bcast = true;
    }
    for (size_t i = 0; i < c.inputs.size(); ++i) {
      if (!(is_bcast && i == 1)) ++plain_uses[c.inputs[i]];
    }
    shapes[c.output] = infer_shape(c, in);
  }

  // Tile in place when the bias has exactly one broadcast shape and no other
  // use; otherwise introduce "<bias>/<dims>" copies.
  std::map<std::pair<std::string, Shape>, std::string> renamed;
  for (const auto& [name, targets] : bcast_targets) {
    const FloatTensor bias = m.weights.at(name);
    if (targets.size() == 1 && plain_uses[name] == 0) {
      m.weights[name] = tile_last_axis(bias, *targets.begin());
      renamed[{name, *targets.begin()}] = name;
      continue;
    }
    for (const auto& t : targets) {
      std::string nn = name + "/" + shape_str(t);
      m.weights[nn] = tile_last_axis(bias, t);
      renamed[{name, t}] = nn;
    }
  }
  shapes.clear();
  if (!g.calls.empty()) shapes[g.input] = declared[g.input];
  for (auto& c : calls) {
    for (auto& name : c.inputs) {
      if (shapes.count(name) == 0) shapes[name] = m.weights.at(name).shape;
    }
    if (c.op == OpKind::MatAdd && c.inputs.size() == 2) {
      const Shape& a = shapes[c.inputs[0]];
      auto it = renamed.find({c.inputs[1], a});
      if (it != renamed.end() && shapes[c.inputs[1]].size() == 1) {
        c.inputs[1] = it->second;
        shapes[c.inputs[1]] = a;
      }
    }
    for (const auto& name : c.inputs) ensure_param(name);
    std::vector<Shape> in;
    for (const auto& name : c.inputs) in.push_back(shapes[name]);
    shapes[c.output] = infer_shape(c, in);
    auto d = declared.find(c.output);
    TRIAD_ENFORCE(d == declared.end() || d->second == shapes[c.output], ShapeError,
                  "'" + c.output + "' declared " + (d == declared.end() ? "" : shape_str(d->second)) +
                      " but computes " + shape_str(shapes[c.output]));
  }
  out.calls = std::move(calls);
  type_check(out);

  // Drop weights the graph never references.
  for (auto it = m.weights.begin(); it != m.weights.end();) {
    const Decl* d = out.find(it->first);
    it = (d != nullptr && d->kind == DeclKind::Param) ? std::next(it) : m.weights.erase(it);
  }
  m.graph = std::move(out);
  return m;
}

FloatModel load_model(const std::string& graph_path, const std::string& weights_path) {
  return make_model(parse_graph(read_text_file(graph_path)),
                    parse_weights(read_binary_file(weights_path)));
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  TRIAD_ENFORCE(f.good(), FormatError, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
  std::string s = read_text_file(path);
  return {s.begin(), s.end()};
}

void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  TRIAD_ENFORCE(f.good(), FormatError, "cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  TRIAD_ENFORCE(f.good(), FormatError, "cannot write " + path);
  f << text;
}

}  // namespace triad::ir
