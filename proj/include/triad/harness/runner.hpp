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

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triad/aramis/session.hpp"
#include "triad/fixedpoint/fixed.hpp"
#include "triad/harness/metrics.hpp"
#include "triad/net/tcp.hpp"

namespace triad::harness {

enum class Mode : uint8_t { Plaintext, Semihonest, Malicious };

// "plaintext", "3pc", "malicious".
Mode parse_mode(std::string_view s);
std::string_view mode_name(Mode m);

struct RunOptions {
  Mode mode = Mode::Semihonest;
  std::string seed = "triad";
  std::chrono::milliseconds timeout{10000};
  std::optional<aramis::TamperSpec> tamper;  // in-process only
  std::array<std::optional<aramis::Digest>, 3> code_hash;
};

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitAbort = 2, kExitTimeout = 3 };

struct RunResult {
  std::vector<ring::RingTensor> outputs;  // opened at P1 (or plaintext)
  std::vector<aramis::PartyOutcome> outcome;
  MetricsReport metrics;
  int exit_code = kExitOk;
};

// 0 when every outcome is ok; 3 when the failure is a timeout seen by some
// party and everyone else only saw the peer go away; 2 for other aborts.
int exit_code_for(const std::vector<aramis::PartyOutcome>& outcome);

// Evaluate the batch with all parties in this process. P0 holds the weights,
// P1 the inputs; P1 announces the batch size to the others.
RunResult run_local(const fixedpoint::FixedModel& m, const std::vector<ring::RingTensor>& inputs,
                    const RunOptions& opt);

// Act as one party over TCP. `peers[i]` is where party i listens (P2 never
// listens). Only P1 reads `inputs`.
RunResult run_tcp(porthos::Role role, const std::array<net::Endpoint, 3>& peers,
                  const fixedpoint::FixedModel& m, const std::vector<ring::RingTensor>& inputs,
                  const RunOptions& opt);

// Protocol microbenchmarks with measured-minus-formula residuals; with a
// model, also one inference on a random input.
MetricsReport bench(const fixedpoint::FixedModel* m, int trials, const std::string& seed);

// Payload the Conv2d protocol must send: (2 H W CI + 2 FH FW CI CO + OH OW CO)
// ring elements of 8 bytes.
int64_t conv_formula_bytes(const ring::Shape& x, const ring::Shape& f, const ring::Shape& out);

}  // namespace triad::harness
