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
#include <functional>
#include <memory>
#include <string>

#include "triad/net/channel.hpp"
#include "triad/porthos/context.hpp"

namespace triad::harness {

using porthos::ProtocolContext;
using porthos::Role;

// Three parties on three threads connected by in-process pipes, with test
// keys derived from `seed`.
class LocalSession {
 public:
  explicit LocalSession(const std::string& seed,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

  ProtocolContext& ctx(Role r) { return *ctx_[static_cast<size_t>(r)]; }
  net::Channel& channel(Role from, Role to);

  // Run fn for every role concurrently. A party that throws closes its
  // channels so the others unblock; the first exception is rethrown.
  void run(const std::function<void(ProtocolContext&)>& fn);

  int64_t payload_sent(Role from) const;
  int64_t payload_total() const;
  int64_t frames_total() const;
  void clear_stats();

 private:
  std::array<std::array<std::unique_ptr<net::Channel>, 3>, 3> ends_;
  std::array<std::unique_ptr<ProtocolContext>, 3> ctx_;
};

}  // namespace triad::harness
