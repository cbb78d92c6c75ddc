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

#include "triad/harness/dataset.hpp"

#include <cstring>

#include "triad/error.hpp"
#include "triad/ir/model.hpp"

namespace triad::harness {

std::vector<ir::FloatTensor> read_images(const std::string& path, const ring::Shape& shape) {
  const std::vector<uint8_t> bytes = ir::read_binary_file(path);
  const size_t per = static_cast<size_t>(ring::numel(shape)) * sizeof(float);
  TRIAD_ENFORCE(per > 0 && bytes.size() % per == 0, FormatError,
                path + ": size " + std::to_string(bytes.size()) + " is not a multiple of " + std::to_string(per));
  std::vector<ir::FloatTensor> out(bytes.size() / per);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].shape = shape;
    out[i].data.resize(per / sizeof(float));
    std::memcpy(out[i].data.data(), bytes.data() + i * per, per);
  }
  return out;
}

void write_images(const std::string& path, const std::vector<ir::FloatTensor>& images) {
  std::vector<uint8_t> bytes;
  for (const auto& t : images) {
    const auto* p = reinterpret_cast<const uint8_t*>(t.data.data());
    bytes.insert(bytes.end(), p, p + t.data.size() * sizeof(float));
  }
  ir::write_binary_file(path, bytes);
}

std::vector<int64_t> read_labels(const std::string& path) {
  const std::vector<uint8_t> bytes = ir::read_binary_file(path);
  return std::vector<int64_t>(bytes.begin(), bytes.end());
}

fixedpoint::LabeledSet read_labeled(const std::string& images, const std::string& labels, const ring::Shape& shape) {
  fixedpoint::LabeledSet s;
  s.image_shape = shape;
  s.images = read_images(images, shape);
  s.labels = read_labels(labels);
  TRIAD_ENFORCE(s.images.size() == s.labels.size(), FormatError,
                "image and label counts differ (" + std::to_string(s.images.size()) + " vs " +
                    std::to_string(s.labels.size()) + ")");
  return s;
}

std::vector<ring::RingTensor> quantize_all(const std::vector<ir::FloatTensor>& images, int scale) {
  std::vector<ring::RingTensor> out;
  out.reserve(images.size());
  for (const auto& t : images) out.push_back(fixedpoint::quantize(t, scale));
  return out;
}

}  // namespace triad::harness
