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

#include "triad/aramis/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

#include "triad/error.hpp"

namespace triad::aramis {

namespace {

struct PkeyFree {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyFree>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;

PkeyPtr private_key(const std::array<uint8_t, 32>& seed) {
  PkeyPtr k(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
  TRIAD_ENFORCE(k != nullptr, Error, "Ed25519 key setup failed");
  return k;
}

}  // namespace

Digest sha256(std::span<const uint8_t> data) {
  Digest d{};
  unsigned int len = 0;
  TRIAD_ENFORCE(EVP_Digest(data.data(), data.size(), d.data(), &len, EVP_sha256(), nullptr) == 1, Error,
                "SHA-256 failed");
  return d;
}

Digest sha256(const std::string& s) {
  return sha256(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

std::string hex(std::span<const uint8_t> b) {
  static const char* k = "0123456789abcdef";
  std::string s;
  for (uint8_t c : b) {
    s.push_back(k[c >> 4]);
    s.push_back(k[c & 15]);
  }
  return s;
}

SigningKey SigningKey::generate() {
  std::array<uint8_t, 32> seed{};
  TRIAD_ENFORCE(RAND_bytes(seed.data(), static_cast<int>(seed.size())) == 1, Error, "RAND_bytes failed");
  return from_seed(seed);
}

SigningKey SigningKey::from_seed(const std::array<uint8_t, 32>& seed) {
  SigningKey k;
  k.pkey_ = std::shared_ptr<EVP_PKEY>(private_key(seed).release(), EVP_PKEY_free);
  size_t len = k.vk_.size();
  TRIAD_ENFORCE(EVP_PKEY_get_raw_public_key(k.pkey_.get(), k.vk_.data(), &len) == 1 && len == 32, Error,
                "Ed25519 public key export failed");
  return k;
}

Signature SigningKey::sign(std::span<const uint8_t> msg) const {
  MdCtxPtr ctx(EVP_MD_CTX_new());
  Signature sig{};
  size_t len = sig.size();
  TRIAD_ENFORCE(ctx && EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey_.get()) == 1 &&
                    EVP_DigestSign(ctx.get(), sig.data(), &len, msg.data(), msg.size()) == 1 && len == 64,
                Error, "Ed25519 signing failed");
  return sig;
}

bool verify(const VerifyKey& vk, std::span<const uint8_t> msg, const Signature& sig) {
  PkeyPtr p(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, vk.data(), vk.size()));
  if (!p) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, p.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), msg.data(), msg.size()) == 1;
}

}  // namespace triad::aramis
