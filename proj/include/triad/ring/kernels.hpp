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

#include <cstddef>
#include <cstdint>

// Data-parallel Z_{2^64} kernels.
//
// Every kernel has a portable scalar reference and, on x86-64 hosts that
// report AVX2 at runtime, a vectorized variant. Both must produce identical
// output words; tests/unit/kernels_test.cpp checks that on random data.
namespace triad::ring::kernels {

using u64 = uint64_t;

struct KernelTable {
  const char* name;
  void (*add)(const u64* a, const u64* b, u64* out, size_t n);
  void (*sub)(const u64* a, const u64* b, u64* out, size_t n);
  void (*mul)(const u64* a, const u64* b, u64* out, size_t n);
  void (*scale)(const u64* a, u64 c, u64* out, size_t n);
  // Arithmetic right shift, 0 <= bits <= 63.
  void (*ashr)(const u64* a, int bits, u64* out, size_t n);
  // out[m x n] = a[m x k] * b[k x n], row-major, all mod 2^64.
  void (*matmul)(const u64* a, const u64* b, u64* out, size_t m, size_t k, size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary or the host lacks AVX2.
const KernelTable* avx2_table();

// The table picked at startup: AVX2 when available, scalar otherwise.
// TRIAD_FORCE_SCALAR=1 in the environment, or force_scalar(true), pins the
// reference kernels.
const KernelTable& active();
void force_scalar(bool on);

}  // namespace triad::ring::kernels
