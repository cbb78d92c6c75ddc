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

#include "triad/ring/prf.hpp"
#include "triad/ring/tensor.hpp"

namespace triad::ring {

// Both halves of a 2-out-of-2 additive sharing. In a live session each party
// only ever holds one part; this type exists for dealers and tests.
struct SecretShare {
  RingTensor part0;
  RingTensor part1;

  RingId ring() const { return part0.ring(); }
};

// part0 = mask, part1 = x - mask.
SecretShare share_with_mask(const RingTensor& x, const RingTensor& mask);
SecretShare share(const RingTensor& x, PrfStream& rng);

RingTensor reconstruct(const RingTensor& part0, const RingTensor& part1);
inline RingTensor reconstruct(const SecretShare& s) { return reconstruct(s.part0, s.part1); }

}  // namespace triad::ring
