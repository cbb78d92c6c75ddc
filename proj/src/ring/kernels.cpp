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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "triad/ring/kernels.hpp"

namespace triad::ring::kernels {
namespace {

std::atomic<bool>& forced() {
  static std::atomic<bool> flag = [] {
    const char* env = std::getenv("TRIAD_FORCE_SCALAR");
    return env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0';
  }();
  return flag;
}

}  // namespace

const KernelTable& active() {
  if (!forced().load(std::memory_order_relaxed)) {
    if (const KernelTable* t = avx2_table()) return *t;
  }
  return scalar_table();
}

void force_scalar(bool on) { forced().store(on, std::memory_order_relaxed); }

}  // namespace triad::ring::kernels
