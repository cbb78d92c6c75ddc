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

#include "triad/harness/local.hpp"

#include <exception>
#include <thread>
#include <vector>

namespace triad::harness {

LocalSession::LocalSession(const std::string& seed, std::chrono::milliseconds timeout) {
  for (size_t a = 0; a < 3; ++a) {
    for (size_t b = a + 1; b < 3; ++b) {
      auto [x, y] = net::make_pipe();
      x->set_timeout(timeout);
      y->set_timeout(timeout);
      ends_[a][b] = std::move(x);
      ends_[b][a] = std::move(y);
    }
  }
  for (size_t r = 0; r < 3; ++r) {
    const auto role = static_cast<Role>(r);
    ctx_[r] = std::make_unique<ProtocolContext>(
        role, porthos::test_keys(role, seed),
        std::array<net::Channel*, 3>{ends_[r][0].get(), ends_[r][1].get(), ends_[r][2].get()});
  }
}

net::Channel& LocalSession::channel(Role from, Role to) {
  return *ends_[static_cast<size_t>(from)][static_cast<size_t>(to)];
}

void LocalSession::run(const std::function<void(ProtocolContext&)>& fn) {
  std::array<std::exception_ptr, 3> errs;
  std::vector<std::thread> threads;
  for (size_t r = 0; r < 3; ++r) {
    threads.emplace_back([&, r] {
      try {
        fn(*ctx_[r]);
      } catch (...) {
        errs[r] = std::current_exception();
        for (auto& c : ends_[r]) {
          if (c) c->close();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

int64_t LocalSession::payload_sent(Role from) const {
  int64_t n = 0;
  for (const auto& c : ends_[static_cast<size_t>(from)]) {
    if (c) n += c->meter().payload_sent;
  }
  return n;
}

int64_t LocalSession::payload_total() const {
  return payload_sent(Role::P0) + payload_sent(Role::P1) + payload_sent(Role::P2);
}

int64_t LocalSession::frames_total() const {
  int64_t n = 0;
  for (const auto& row : ends_) {
    for (const auto& c : row) {
      if (c) n += c->meter().frames_sent;
    }
  }
  return n;
}

void LocalSession::clear_stats() {
  for (auto& row : ends_) {
    for (auto& c : row) {
      if (c) c->reset_meter();
    }
  }
  for (auto& c : ctx_) c->clear_stats();
}

}  // namespace triad::harness
