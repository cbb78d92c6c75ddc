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

#include "triad/harness/bundle.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "triad/error.hpp"
#include "triad/ir/passes.hpp"

namespace triad::harness {

using nlohmann::json;

namespace {

std::string base64(const std::vector<uint8_t>& in) {
  std::string out(4 * ((in.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), in.data(), static_cast<int>(in.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

std::vector<uint8_t> unbase64(const std::string& in) {
  TRIAD_ENFORCE(in.size() % 4 == 0, FormatError, "bad base64 length");
  std::vector<uint8_t> out(in.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
  TRIAD_ENFORCE(n >= 0, FormatError, "bad base64 data");
  size_t pad = 0;
  for (size_t i = in.size(); i > 0 && in[i - 1] == '='; --i) ++pad;
  out.resize(static_cast<size_t>(n) - pad);
  return out;
}

}  // namespace

Bundle make_bundle(ir::FloatModel model, int scale, std::vector<double> accuracy, bool switch_relu_maxpool) {
  Bundle b;
  if (switch_relu_maxpool) {
    b.fixed = fixedpoint::quantize_model(ir::FloatModel{ir::relu_maxpool_switch(model.graph), model.weights}, scale);
  } else {
    b.fixed = fixedpoint::quantize_model(model, scale);
  }
  b.switch_relu_maxpool = switch_relu_maxpool;
  b.model = std::move(model);
  b.scale = scale;
  b.accuracy = std::move(accuracy);
  return b;
}

std::string bundle_to_json(const Bundle& b) {
  const ir::Liveness live = ir::liveness(b.fixed.graph);
  json j;
  j["format"] = "triad-bundle";
  j["version"] = 1;
  j["scale"] = b.scale;
  j["graph"] = json::parse(ir::graph_to_json(b.model.graph));
  j["weights"] = base64(ir::weights_to_bytes(b.model.weights));
  j["llil"] = ir::to_text(b.fixed.graph, b.scale);
  j["trace"] = ir::trace_to_text(b.fixed.trace);
  j["accuracy"] = b.accuracy;
  j["switch_relu_maxpool"] = b.switch_relu_maxpool;
  j["analysis"] = {{"relu", ir::count_relu(b.fixed.graph)},
                   {"scaledown_elems", ir::count_scaledown(b.fixed.graph)},
                   {"peak_bytes", live.peak_bytes},
                   {"total_bytes", live.total_bytes},
                   {"overflowed_weights", b.fixed.overflowed_weights}};
  return j.dump(1);
}

Bundle parse_bundle(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bundle is not JSON: ") + e.what());
  }
  TRIAD_ENFORCE(j.is_object() && j.value("format", "") == "triad-bundle", FormatError, "not a bundle");
  TRIAD_ENFORCE(j.value("version", 0) == 1, FormatError, "unsupported bundle version");
  try {
    const int scale = j.at("scale").get<int>();
    TRIAD_ENFORCE(scale >= 0 && scale < 64, FormatError, "bundle scale out of range");
    ir::FloatModel m = ir::make_model(ir::parse_graph(j.at("graph").dump()),
                                      ir::parse_weights(unbase64(j.at("weights").get<std::string>())));
    Bundle b = make_bundle(std::move(m), scale, j.value("accuracy", std::vector<double>{}),
                           j.value("switch_relu_maxpool", true));
    TRIAD_ENFORCE(ir::to_text(b.fixed.graph, scale) == j.at("llil").get<std::string>(), FormatError,
                  "bundle program does not match its graph");
    return b;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad bundle: ") + e.what());
  }
}

Bundle read_bundle(const std::string& path) { return parse_bundle(ir::read_text_file(path)); }

void write_bundle(const std::string& path, const Bundle& b) { ir::write_text_file(path, bundle_to_json(b)); }

}  // namespace triad::harness
