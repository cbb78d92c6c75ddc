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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triad/porthos/context.hpp"

namespace triad::harness {

struct ChannelStats {
  int64_t payload = 0;  // protocol payload bytes
  int64_t frames = 0;
  int64_t wire = 0;     // bytes on the transport: headers, counters, signatures, tokens
};

struct MetricsReport {
  std::string mode;
  std::map<std::string, double> phase_ms;
  std::map<std::string, ChannelStats> bytes;  // keyed "P0->P1"
  std::map<std::string, int64_t> protocols;   // payload attributed to the outermost protocol
  porthos::OpCounters ops;
  std::map<std::string, double> residuals;
  int64_t peak_bytes = 0;
  int64_t total_bytes = 0;
  std::map<std::string, std::string> transcript;  // role -> chain head
  std::vector<int64_t> predictions;
  std::vector<int64_t> labels;
  std::vector<nlohmann::json> aborts;

  int64_t payload_total() const;
  int64_t protocol_total() const;
  nlohmann::json to_json() const;
};

}  // namespace triad::harness
