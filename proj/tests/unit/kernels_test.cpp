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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "triad/ring/kernels.hpp"

namespace triad::ring::kernels {
namespace {

std::vector<u64> random_words(size_t n, std::mt19937_64& g) {
  std::vector<u64> v(n);
  for (auto& x : v) {
    switch (g() % 6) {
      case 0:
        x = ~u64{0} - g() % 3;
        break;
      case 1:
        x = u64{1} << 63 | (g() & 0xff);
        break;
      default:
        x = g();
    }
  }
  return v;
}

class Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_table();
    if (simd_ == nullptr) GTEST_SKIP() << "no AVX2 on this host";
  }
  const KernelTable& ref_ = scalar_table();
  const KernelTable* simd_ = nullptr;
  std::mt19937_64 g_{1234};
};

TEST_F(Equivalence, Elementwise) {
  for (size_t n : {0, 1, 3, 4, 5, 17, 64, 1001}) {
    auto a = random_words(n, g_), b = random_words(n, g_);
    std::vector<u64> x(n), y(n);
    ref_.add(a.data(), b.data(), x.data(), n);
    simd_->add(a.data(), b.data(), y.data(), n);
    EXPECT_EQ(x, y) << "add n=" << n;
    ref_.sub(a.data(), b.data(), x.data(), n);
    simd_->sub(a.data(), b.data(), y.data(), n);
    EXPECT_EQ(x, y) << "sub n=" << n;
    ref_.mul(a.data(), b.data(), x.data(), n);
    simd_->mul(a.data(), b.data(), y.data(), n);
    EXPECT_EQ(x, y) << "mul n=" << n;
    u64 c = g_();
    ref_.scale(a.data(), c, x.data(), n);
    simd_->scale(a.data(), c, y.data(), n);
    EXPECT_EQ(x, y) << "scale n=" << n;
  }
}

TEST_F(Equivalence, ArithmeticShiftAllAmounts) {
  auto a = random_words(257, g_);
  std::vector<u64> x(a.size()), y(a.size());
  for (int bits = 0; bits < 64; ++bits) {
    ref_.ashr(a.data(), bits, x.data(), a.size());
    simd_->ashr(a.data(), bits, y.data(), a.size());
    ASSERT_EQ(x, y) << "bits=" << bits;
  }
}

TEST_F(Equivalence, Matmul) {
  for (int t = 0; t < 50; ++t) {
    size_t m = 1 + g_() % 9, k = 1 + g_() % 13, n = 1 + g_() % 11;
    auto a = random_words(m * k, g_), b = random_words(k * n, g_);
    std::vector<u64> x(m * n), y(m * n);
    ref_.matmul(a.data(), b.data(), x.data(), m, k, n);
    simd_->matmul(a.data(), b.data(), y.data(), m, k, n);
    ASSERT_EQ(x, y) << m << "x" << k << "x" << n;
  }
}

TEST(Dispatch, ForceScalar) {
  force_scalar(true);
  EXPECT_EQ(&active(), &scalar_table());
  force_scalar(false);
  if (avx2_table() != nullptr) EXPECT_EQ(&active(), avx2_table());
}

}  // namespace
}  // namespace triad::ring::kernels
