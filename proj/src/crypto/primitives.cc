// Copyright 2026 The Petra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "petra/crypto/primitives.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

#include "petra/common/error.h"

namespace petra {

Digest Sha256(ByteView data) {
  Digest out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

struct Sha256Hasher::State {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  ~State() { EVP_MD_CTX_free(ctx); }
};

Sha256Hasher::Sha256Hasher() : state_(std::make_unique<State>()) {
  EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr);
}

Sha256Hasher::~Sha256Hasher() = default;

Sha256Hasher& Sha256Hasher::Update(ByteView data) {
  EVP_DigestUpdate(state_->ctx, data.data(), data.size());
  return *this;
}

Digest Sha256Hasher::Finish() {
  Digest out;
  unsigned int len = 0;
  EVP_DigestFinal_ex(state_->ctx, out.data(), &len);
  return out;
}

Digest HmacSha256(ByteView key, ByteView data) {
  Digest out;
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(),
       data.size(), out.data(), &len);
  return out;
}

void SystemRandom::Fill(std::span<uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

DeterministicRandom::DeterministicRandom(ByteView seed) : key_(Sha256(seed)) {}

DeterministicRandom::DeterministicRandom(uint64_t seed) {
  ByteWriter w;
  w.Lp("petra-deterministic-random");
  w.U32(static_cast<uint32_t>(seed >> 32)).U32(static_cast<uint32_t>(seed));
  key_ = Sha256(w.bytes());
}

void DeterministicRandom::Fill(std::span<uint8_t> out) {
  std::lock_guard<std::mutex> lock(mu_);
  size_t offset = 0;
  while (offset < out.size()) {
    ByteWriter block;
    block.U32(static_cast<uint32_t>(counter_ >> 32))
        .U32(static_cast<uint32_t>(counter_));
    ++counter_;
    Digest chunk = HmacSha256(key_, block.bytes());
    size_t n = std::min(chunk.size(), out.size() - offset);
    std::memcpy(out.data() + offset, chunk.data(), n);
    offset += n;
  }
}

RandomSource& DefaultRandom() {
  static SystemRandom* rng = new SystemRandom();
  return *rng;
}

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

struct PkeyDeleter {
  void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

}  // namespace

Bytes AeadSeal(const AeadKey& key, const AeadNonce& nonce, ByteView plaintext,
               ByteView aad) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr);
  EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kAeadNonceSize,
                      nullptr);
  EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data());
  int len = 0;
  if (!aad.empty()) {
    EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                      static_cast<int>(aad.size()));
  }
  Bytes out(plaintext.size() + kAeadTagSize);
  EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                    static_cast<int>(plaintext.size()));
  int total = len;
  EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len);
  total += len;
  EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize,
                      out.data() + total);
  out.resize(total + kAeadTagSize);
  return out;
}

absl::StatusOr<Bytes> AeadOpen(const AeadKey& key, const AeadNonce& nonce,
                               ByteView ciphertext_and_tag, ByteView aad) {
  if (ciphertext_and_tag.size() < kAeadTagSize) {
    return Error(ErrorCode::kAuthenticationFailure, "ciphertext too short");
  }
  const size_t ct_len = ciphertext_and_tag.size() - kAeadTagSize;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr);
  EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kAeadNonceSize,
                      nullptr);
  EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data());
  int len = 0;
  if (!aad.empty()) {
    EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                      static_cast<int>(aad.size()));
  }
  Bytes out(ct_len);
  EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext_and_tag.data(),
                    static_cast<int>(ct_len));
  int total = len;
  Bytes tag(ciphertext_and_tag.begin() + ct_len, ciphertext_and_tag.end());
  EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize,
                      tag.data());
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    return Error(ErrorCode::kAuthenticationFailure, "AEAD tag mismatch");
  }
  out.resize(total + len);
  return out;
}

SigningKeyPair SigningKeyPair::Generate(RandomSource& rng) {
  Bytes seed = rng.Take(32);
  return *FromSeed(seed);
}

absl::StatusOr<SigningKeyPair> SigningKeyPair::FromSeed(ByteView seed) {
  if (seed.size() != 32) {
    return Error(ErrorCode::kMalformedKey, "Ed25519 seed must be 32 bytes");
  }
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                        seed.size()));
  if (!key) return Error(ErrorCode::kMalformedKey, "bad Ed25519 seed");
  SigningKeyPair pair;
  pair.secret_key.assign(seed.begin(), seed.end());
  pair.public_key.resize(32);
  size_t len = 32;
  EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len);
  return pair;
}

Bytes Sign(ByteView secret_key, ByteView message) {
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                        secret_key.data(), secret_key.size()));
  if (!key) return {};
  MdCtx ctx(EVP_MD_CTX_new());
  EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get());
  Bytes sig(kSignatureSize);
  size_t len = sig.size();
  EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size());
  sig.resize(len);
  return sig;
}

bool VerifySignature(ByteView public_key, ByteView message,
                     ByteView signature) {
  if (public_key.size() != 32 || signature.size() != kSignatureSize) {
    return false;
  }
  Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                       public_key.data(), public_key.size()));
  if (!key) return false;
  MdCtx ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) !=
      1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

}  // namespace petra
