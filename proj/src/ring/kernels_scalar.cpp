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

#include <cstdint>
#include <cstring>

#include "triad/ring/kernels.hpp"

namespace triad::ring::kernels {
namespace {

void add_scalar(const u64* a, const u64* b, u64* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const u64* a, const u64* b, u64* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_scalar(const u64* a, const u64* b, u64* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(const u64* a, u64 c, u64* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] * c;
}

void ashr_scalar(const u64* a, int bits, u64* out, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = static_cast<u64>(static_cast<int64_t>(a[i]) >> bits);
  }
}

void matmul_scalar(const u64* a, const u64* b, u64* out, size_t m, size_t k, size_t n) {
  std::memset(out, 0, m * n * sizeof(u64));
  for (size_t i = 0; i < m; ++i) {
    u64* row = out + i * n;
    for (size_t p = 0; p < k; ++p) {
      const u64 av = a[i * k + p];
      if (av == 0) continue;
      const u64* brow = b + p * n;
      for (size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",     add_scalar, sub_scalar, mul_scalar,
                                 scale_scalar, ashr_scalar, matmul_scalar};
  return table;
}

}  // namespace triad::ring::kernels
