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

#include "triad/ring/prf.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <limits>

#include "triad/error.hpp"

namespace triad::ring {

struct PrfStream::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;

  explicit Cipher(const KeyBytes& key) {
    ctx = EVP_CIPHER_CTX_new();
    TRIAD_ENFORCE(ctx != nullptr, Error, "EVP_CIPHER_CTX_new failed");
    if (EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1) {
      EVP_CIPHER_CTX_free(ctx);
      throw Error("AES-128 key setup failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx, 0);
  }
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
  Cipher(const Cipher&) = delete;
  Cipher& operator=(const Cipher&) = delete;
};

KeyBytes key_from_seed(std::string_view seed) {
  uint8_t digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const uint8_t*>(seed.data()), seed.size(), digest);
  KeyBytes k;
  std::memcpy(k.data(), digest, k.size());
  return k;
}

KeyBytes random_key() {
  KeyBytes k;
  TRIAD_ENFORCE(RAND_bytes(k.data(), static_cast<int>(k.size())) == 1, Error,
                "RAND_bytes failed");
  return k;
}

PrfStream::PrfStream(const KeyBytes& key, uint64_t label, uint64_t counter)
    : key_(key), label_(label), counter_(counter), cipher_(std::make_unique<Cipher>(key)) {}

PrfStream::PrfStream(const PrfStream& o)
    : key_(o.key_),
      label_(o.label_),
      counter_(o.counter_),
      cipher_(std::make_unique<Cipher>(o.key_)),
      buf_(o.buf_),
      pos_(o.pos_),
      len_(o.len_) {}

PrfStream& PrfStream::operator=(const PrfStream& o) {
  if (this != &o) {
    PrfStream tmp(o);
    *this = std::move(tmp);
  }
  return *this;
}

PrfStream::PrfStream(PrfStream&&) noexcept = default;
PrfStream& PrfStream::operator=(PrfStream&&) noexcept = default;
PrfStream::~PrfStream() = default;

void PrfStream::seek(uint64_t counter) {
  counter_ = counter;
  pos_ = len_ = 0;
}

void PrfStream::refill() {
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  TRIAD_ENFORCE(counter_ <= kMax - kBufBlocks, PrfExhausted,
                "PRF counter exhausted for label " + std::to_string(label_));
  std::array<uint8_t, kBufBlocks * 16> in;
  for (size_t b = 0; b < kBufBlocks; ++b) {
    uint64_t c = counter_ + b;
    for (int i = 0; i < 8; ++i) {
      in[b * 16 + i] = static_cast<uint8_t>(label_ >> (8 * i));
      in[b * 16 + 8 + i] = static_cast<uint8_t>(c >> (8 * i));
    }
  }
  int outl = 0;
  TRIAD_ENFORCE(EVP_EncryptUpdate(cipher_->ctx, buf_.data(), &outl, in.data(),
                                  static_cast<int>(in.size())) == 1 &&
                    outl == static_cast<int>(in.size()),
                Error, "AES encryption failed");
  counter_ += kBufBlocks;
  pos_ = 0;
  len_ = buf_.size();
}

void PrfStream::fill(std::span<uint8_t> out) {
  size_t done = 0;
  while (done < out.size()) {
    if (pos_ == len_) refill();
    size_t take = std::min(out.size() - done, len_ - pos_);
    std::memcpy(out.data() + done, buf_.data() + pos_, take);
    pos_ += take;
    done += take;
  }
}

uint8_t PrfStream::next_byte() {
  if (pos_ == len_) refill();
  return buf_[pos_++];
}

uint64_t PrfStream::next_u64() {
  uint8_t b[8];
  fill(b);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

uint64_t PrfStream::next_zp() {
  for (;;) {
    if (auto v = zp_accept(next_byte())) return *v;
  }
}

uint64_t PrfStream::next_zp_nonzero() {
  // 198 = 3 * 66
  for (;;) {
    uint8_t b = next_byte();
    if (b < 3 * (kPrime - 1)) return 1 + b % (kPrime - 1);
  }
}

uint64_t PrfStream::next_zlm1() {
  for (;;) {
    uint64_t v = next_u64();
    if (v != kZLm1Modulus) return v;
  }
}

uint64_t PrfStream::next_bit() { return next_byte() & 1u; }

uint64_t PrfStream::next(RingId ring) {
  switch (ring) {
    case RingId::ZL:
      return next_u64();
    case RingId::ZLm1:
      return next_zlm1();
    case RingId::Zp:
      return next_zp();
  }
  return 0;
}

void PrfStream::expand_into(RingId ring, std::span<uint64_t> out) {
  if (ring == RingId::ZL) {
    for (auto& v : out) v = next_u64();
    return;
  }
  for (auto& v : out) v = next(ring);
}

RingTensor PrfStream::expand(RingId ring, const Shape& shape) {
  RingTensor t(ring, shape);
  expand_into(ring, t.mutable_data());
  return t;
}

RingTensor prf_expand(PrfStream& stream, RingId ring, int64_t count) {
  TRIAD_ENFORCE(count >= 0, ShapeError, "negative count");
  return stream.expand(ring, {count});
}

}  // namespace triad::ring
