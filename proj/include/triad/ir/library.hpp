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

// Data-movement library functions. They only copy elements around, so the
// same code runs on plaintext values, float tensors and individual shares.

#include <cstdint>
#include <span>
#include <vector>

#include "triad/ir/ir.hpp"

namespace triad::ir::lib {

inline std::vector<int64_t> strides_of(const Shape& s) {
  std::vector<int64_t> st(s.size(), 1);
  for (size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
  return st;
}

// Pad with zeros; pads = {before0, after0, before1, after1, ...}.
template <class T>
std::vector<T> pad(std::span<const T> src, const Shape& in, const std::vector<int64_t>& pads) {
  Shape out = in;
  for (size_t i = 0; i < in.size(); ++i) out[i] += pads[2 * i] + pads[2 * i + 1];
  std::vector<T> dst(static_cast<size_t>(ring::numel(out)), T{});
  const auto so = strides_of(out);
  std::vector<int64_t> idx(in.size(), 0);
  for (size_t flat = 0; flat < src.size(); ++flat) {
    int64_t off = 0;
    for (size_t d = 0; d < in.size(); ++d) off += (idx[d] + pads[2 * d]) * so[d];
    dst[static_cast<size_t>(off)] = src[flat];
    for (size_t d = in.size(); d-- > 0;) {
      if (++idx[d] < in[d]) break;
      idx[d] = 0;
    }
  }
  return dst;
}

template <class T>
std::vector<T> transpose(std::span<const T> src, const Shape& in, const std::vector<int64_t>& perm) {
  Shape out(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) out[i] = in[static_cast<size_t>(perm[i])];
  const auto si = strides_of(in);
  std::vector<T> dst(src.size());
  std::vector<int64_t> idx(out.size(), 0);
  for (size_t flat = 0; flat < dst.size(); ++flat) {
    int64_t off = 0;
    for (size_t d = 0; d < out.size(); ++d) off += idx[d] * si[static_cast<size_t>(perm[d])];
    dst[flat] = src[static_cast<size_t>(off)];
    for (size_t d = out.size(); d-- > 0;) {
      if (++idx[d] < out[d]) break;
      idx[d] = 0;
    }
  }
  return dst;
}

template <class T>
std::vector<T> concat(const std::vector<std::span<const T>>& parts, const std::vector<Shape>& shapes,
                      int64_t axis) {
  // Treat each part as [outer, axis_len * inner].
  int64_t outer = 1, inner = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= shapes[0][static_cast<size_t>(i)];
  for (size_t i = static_cast<size_t>(axis) + 1; i < shapes[0].size(); ++i) inner *= shapes[0][i];
  std::vector<T> dst;
  size_t total = 0;
  for (const auto& p : parts) total += p.size();
  dst.reserve(total);
  for (int64_t o = 0; o < outer; ++o) {
    for (size_t k = 0; k < parts.size(); ++k) {
      const int64_t chunk = shapes[k][static_cast<size_t>(axis)] * inner;
      auto first = parts[k].begin() + o * chunk;
      dst.insert(dst.end(), first, first + chunk);
    }
  }
  return dst;
}

// Window extraction for HWC convolution: row r = oy * OW + ox holds the
// FH x FW x C patch at (oy*sh, ox*sw), column (k * FW + l) * C + c.
template <class T>
std::vector<T> im2col(std::span<const T> x, int64_t h, int64_t w, int64_t c, int64_t fh, int64_t fw,
                      int64_t sh, int64_t sw) {
  const int64_t oh = (h - fh) / sh + 1, ow = (w - fw) / sw + 1;
  const int64_t cols = fh * fw * c;
  std::vector<T> out(static_cast<size_t>(oh * ow * cols));
  for (int64_t oy = 0; oy < oh; ++oy) {
    for (int64_t ox = 0; ox < ow; ++ox) {
      T* row = out.data() + (oy * ow + ox) * cols;
      for (int64_t k = 0; k < fh; ++k) {
        const T* src = x.data() + ((oy * sh + k) * w + ox * sw) * c;
        for (int64_t i = 0; i < fw * c; ++i) row[k * fw * c + i] = src[i];
      }
    }
  }
  return out;
}

// Flat input indices of every pooling window, window-major:
// result[win * (a*b) + k], windows ordered (oy, ox, channel), k = dy * b + dx.
inline std::vector<int64_t> pool_windows(const Shape& in, int64_t a, int64_t b, int64_t sh,
                                         int64_t sw) {
  const int64_t h = in[0], w = in[1], c = in[2];
  const int64_t oh = (h - a) / sh + 1, ow = (w - b) / sw + 1;
  std::vector<int64_t> idx;
  idx.reserve(static_cast<size_t>(oh * ow * c * a * b));
  for (int64_t oy = 0; oy < oh; ++oy) {
    for (int64_t ox = 0; ox < ow; ++ox) {
      for (int64_t ch = 0; ch < c; ++ch) {
        for (int64_t dy = 0; dy < a; ++dy) {
          for (int64_t dx = 0; dx < b; ++dx) {
            idx.push_back(((oy * sh + dy) * w + ox * sw + dx) * c + ch);
          }
        }
      }
    }
  }
  return idx;
}

}  // namespace triad::ir::lib
