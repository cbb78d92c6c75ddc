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

namespace triad::harness {

// Images: float32 little-endian, row-major, back to back, each of
// numel(shape) values. Labels: one byte per image.
std::vector<ir::FloatTensor> read_images(const std::string& path, const ring::Shape& shape);
void write_images(const std::string& path, const std::vector<ir::FloatTensor>& images);
std::vector<int64_t> read_labels(const std::string& path);

fixedpoint::LabeledSet read_labeled(const std::string& images, const std::string& labels,
                                    const ring::Shape& shape);

std::vector<ring::RingTensor> quantize_all(const std::vector<ir::FloatTensor>& images, int scale);

}  // namespace triad::harness
