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

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define TRIAD_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#endif

namespace triad::ring::kernels {

#ifdef TRIAD_HAVE_AVX2_BUILD
namespace {

#define TRIAD_AVX2 __attribute__((target("avx2")))

// Low 64 bits of a 64x64 product per lane, built from 32x32->64 multiplies:
//   lo(a)*lo(b) + ((hi(a)*lo(b) + lo(a)*hi(b)) << 32)
TRIAD_AVX2 inline __m256i mullo64(__m256i a, __m256i b) {
  __m256i a_hi = _mm256_srli_epi64(a, 32);
  __m256i b_hi = _mm256_srli_epi64(b, 32);
  __m256i ll = _mm256_mul_epu32(a, b);
  __m256i hl = _mm256_mul_epu32(a_hi, b);
  __m256i lh = _mm256_mul_epu32(a, b_hi);
  __m256i cross = _mm256_slli_epi64(_mm256_add_epi64(hl, lh), 32);
  return _mm256_add_epi64(ll, cross);
}

TRIAD_AVX2 inline __m256i load(const u64* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

TRIAD_AVX2 inline void store(u64* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

TRIAD_AVX2 void add_avx2(const u64* a, const u64* b, u64* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, _mm256_add_epi64(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

TRIAD_AVX2 void sub_avx2(const u64* a, const u64* b, u64* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, _mm256_sub_epi64(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

TRIAD_AVX2 void mul_avx2(const u64* a, const u64* b, u64* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, mullo64(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

TRIAD_AVX2 void scale_avx2(const u64* a, u64 c, u64* out, size_t n) {
  const __m256i cv = _mm256_set1_epi64x(static_cast<long long>(c));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, mullo64(load(a + i), cv));
  for (; i < n; ++i) out[i] = a[i] * c;
}

// AVX2 has no 64-bit arithmetic shift; shift logically and OR the sign fill.
TRIAD_AVX2 void ashr_avx2(const u64* a, int bits, u64* out, size_t n) {
  const __m128i cnt = _mm_cvtsi32_si128(bits);
  const __m128i fill_cnt = _mm_cvtsi32_si128(64 - bits);
  const __m256i zero = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = load(a + i);
    __m256i sign = _mm256_cmpgt_epi64(zero, v);
    __m256i shifted = _mm256_srl_epi64(v, cnt);
    __m256i fill = bits == 0 ? zero : _mm256_sll_epi64(sign, fill_cnt);
    store(out + i, _mm256_or_si256(shifted, fill));
  }
  for (; i < n; ++i) out[i] = static_cast<u64>(static_cast<int64_t>(a[i]) >> bits);
}

TRIAD_AVX2 void matmul_avx2(const u64* a, const u64* b, u64* out, size_t m, size_t k,
                            size_t n) {
  std::memset(out, 0, m * n * sizeof(u64));
  for (size_t i = 0; i < m; ++i) {
    u64* row = out + i * n;
    for (size_t p = 0; p < k; ++p) {
      const u64 av = a[i * k + p];
      if (av == 0) continue;
      const __m256i avv = _mm256_set1_epi64x(static_cast<long long>(av));
      const u64* brow = b + p * n;
      size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        store(row + j, _mm256_add_epi64(load(row + j), mullo64(avv, load(brow + j))));
      }
      for (; j < n; ++j) row[j] += av * brow[j];
    }
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2",     add_avx2,  sub_avx2,   mul_avx2,
                                 scale_avx2, ashr_avx2, matmul_avx2};
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace triad::ring::kernels
