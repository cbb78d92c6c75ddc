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

#include <string>
#include <vector>

#include "triad/fixedpoint/fixed.hpp"
#include "triad/ir/model.hpp"

namespace triad::harness {

// A compiled model: the float graph and weights, the chosen scale, the
// lowered program and its call trace, plus the accuracy table when a sweep
// was run. `fixed` is rebuilt from the float model when a bundle is read.
struct Bundle {
  ir::FloatModel model;
  int scale = 0;
  std::vector<double> accuracy;  // by scale; empty without a sweep
  bool switch_relu_maxpool = true;
  fixedpoint::FixedModel fixed;
};

// Lowers at `scale`, after commuting MaxPool(ReLU(.)) pairs unless disabled.
Bundle make_bundle(ir::FloatModel model, int scale, std::vector<double> accuracy = {},
                   bool switch_relu_maxpool = true);

std::string bundle_to_json(const Bundle& b);
// Throws FormatError on malformed input or when the stored program does not
// match the one lowered from the stored graph.
Bundle parse_bundle(const std::string& text);

Bundle read_bundle(const std::string& path);
void write_bundle(const std::string& path, const Bundle& b);

}  // namespace triad::harness
