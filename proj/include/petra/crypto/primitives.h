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

// Thin wrappers over OpenSSL: SHA-256, AES-256-GCM, Ed25519, and the
// randomness sources used throughout the pipeline.

#ifndef PETRA_CRYPTO_PRIMITIVES_H_
#define PETRA_CRYPTO_PRIMITIVES_H_

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"

namespace petra {

inline constexpr size_t kDigestSize = 32;
using Digest = std::array<uint8_t, kDigestSize>;

Digest Sha256(ByteView data);

// Streaming SHA-256.
class Sha256Hasher {
 public:
  Sha256Hasher();
  ~Sha256Hasher();
  Sha256Hasher(const Sha256Hasher&) = delete;
  Sha256Hasher& operator=(const Sha256Hasher&) = delete;

  Sha256Hasher& Update(ByteView data);
  Digest Finish();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

Digest HmacSha256(ByteView key, ByteView data);

// Source of cryptographic randomness. Implementations must be safe to call
// from several threads.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<uint8_t> out) = 0;

  template <size_t N>
  std::array<uint8_t, N> Array() {
    std::array<uint8_t, N> out;
    Fill(out);
    return out;
  }
  Bytes Take(size_t n) {
    Bytes out(n);
    Fill(out);
    return out;
  }
};

// OpenSSL's CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// Seeded HMAC-SHA256 counter-mode stream. Reproducible; for tests, golden
// vectors and benchmarks only.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(ByteView seed);
  explicit DeterministicRandom(uint64_t seed);
  void Fill(std::span<uint8_t> out) override;

 private:
  std::mutex mu_;
  Digest key_;
  uint64_t counter_ = 0;
};

RandomSource& DefaultRandom();

// AES-256-GCM.
inline constexpr size_t kAeadKeySize = 32;
inline constexpr size_t kAeadNonceSize = 12;
inline constexpr size_t kAeadTagSize = 16;
using AeadKey = std::array<uint8_t, kAeadKeySize>;
using AeadNonce = std::array<uint8_t, kAeadNonceSize>;

// Returns ciphertext || tag.
Bytes AeadSeal(const AeadKey& key, const AeadNonce& nonce, ByteView plaintext,
               ByteView aad = {});
// Fails with AUTHENTICATION_FAILURE on any tag mismatch.
absl::StatusOr<Bytes> AeadOpen(const AeadKey& key, const AeadNonce& nonce,
                               ByteView ciphertext_and_tag, ByteView aad = {});

// Ed25519 signing keys.
inline constexpr size_t kSignatureSize = 64;

struct SigningKeyPair {
  Bytes secret_key;  // 32-byte seed
  Bytes public_key;  // 32 bytes

  static SigningKeyPair Generate(RandomSource& rng);
  static absl::StatusOr<SigningKeyPair> FromSeed(ByteView seed);
};

Bytes Sign(ByteView secret_key, ByteView message);
bool VerifySignature(ByteView public_key, ByteView message,
                     ByteView signature);

}  // namespace petra

#endif  // PETRA_CRYPTO_PRIMITIVES_H_
