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

#include "triad/ring/share.hpp"

namespace triad::ring {

SecretShare share_with_mask(const RingTensor& x, const RingTensor& mask) {
  return SecretShare{mask, x - mask};
}

SecretShare share(const RingTensor& x, PrfStream& rng) {
  return share_with_mask(x, rng.expand(x.ring(), x.shape()));
}

RingTensor reconstruct(const RingTensor& part0, const RingTensor& part1) { return part0 + part1; }

}  // namespace triad::ring
