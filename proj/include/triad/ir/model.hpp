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
#include <vector>

#include "triad/ir/ir.hpp"

namespace triad::ir {

struct FloatTensor {
  Shape shape;
  std::vector<float> data;

  bool operator==(const FloatTensor&) const = default;
};

using WeightMap = std::map<std::string, FloatTensor>;

struct FloatModel {
  HLILProgram graph;
  WeightMap weights;
};

// Graph file: {"tensors":[{"name","dims"}], "nodes":[{"op","inputs","output",
// "attrs":{...}}], "input", "output"}. Temporaries need not be declared.
HLILProgram parse_graph(const std::string& json_text);
std::string graph_to_json(const Program& p);

// Weights file: repeated (u32 name length, name, u32 rank, u32 dims[rank],
// f32 data), all little-endian.
WeightMap parse_weights(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> weights_to_bytes(const WeightMap& w);

// Bind a graph to its weights: every tensor present in the weights becomes a
// parameter, shapes are checked, rank-1 biases broadcast by MatAdd are tiled
// to the full operand shape, and the result is type-checked.
FloatModel make_model(HLILProgram graph, WeightMap weights);
FloatModel load_model(const std::string& graph_path, const std::string& weights_path);

std::string read_text_file(const std::string& path);
std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace triad::ir
