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

#include "triad/harness/metrics.hpp"

namespace triad::harness {

using nlohmann::json;

int64_t MetricsReport::payload_total() const {
  int64_t n = 0;
  for (const auto& [k, c] : bytes) n += c.payload;
  return n;
}

int64_t MetricsReport::protocol_total() const {
  int64_t n = 0;
  for (const auto& [k, v] : protocols) n += v;
  return n;
}

json MetricsReport::to_json() const {
  json j;
  j["mode"] = mode;
  j["phase_ms"] = json::object();
  for (const auto& [k, v] : phase_ms) j["phase_ms"][k] = v;
  j["bytes"] = json::object();
  for (const auto& [k, c] : bytes) j["bytes"][k] = {{"payload", c.payload}, {"frames", c.frames}, {"wire", c.wire}};
  j["protocols"] = json::object();
  for (const auto& [k, v] : protocols) j["protocols"][k] = v;
  j["ops"] = {{"relu", ops.relu}, {"comparisons", ops.comparisons}, {"scaledown_elems", ops.scaledown_elems}};
  j["residuals"] = json::object();
  for (const auto& [k, v] : residuals) j["residuals"][k] = v;
  j["liveness"] = {{"peak_bytes", peak_bytes}, {"total_bytes", total_bytes}};
  if (!transcript.empty()) j["transcript"] = transcript;
  j["predictions"] = predictions;
  if (!labels.empty()) {
    j["labels"] = labels;
    int64_t hits = 0;
    for (size_t i = 0; i < labels.size() && i < predictions.size(); ++i) hits += predictions[i] == labels[i];
    j["accuracy"] = labels.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(labels.size());
  }
  if (!aborts.empty()) j["aborts"] = aborts;
  return j;
}

}  // namespace triad::harness
