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

// Attribute-based key encapsulation. One random 256-bit key is encapsulated
// per distinct access tree; node payloads are sealed with that key.

#ifndef PETRA_ABE_ABKEM_H_
#define PETRA_ABE_ABKEM_H_

#include <cstdint>
#include <string_view>
#include <utility>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"
#include "petra/policy/access_tree.h"

namespace petra::abe {

enum class SchemeId : uint8_t {
  kBswTypeA = 0x01,
  // Predicate-faithful but offers no confidentiality: the public parameters
  // contain the master secret. For fast tests only.
  kInsecureTest = 0x7f,
};

std::string_view SchemeName(SchemeId scheme);
absl::StatusOr<SchemeId> ParseSchemeName(std::string_view name);

enum class KeyKind : uint8_t {
  kPublicParams = 0x01,
  kMasterKey = 0x02,
  kSecretKey = 0x03,
};

struct PublicParams {
  SchemeId scheme = SchemeId::kBswTypeA;
  Bytes payload;
};

struct MasterKey {
  SchemeId scheme = SchemeId::kBswTypeA;
  Bytes payload;
};

struct AttributeSecretKey {
  SchemeId scheme = SchemeId::kBswTypeA;
  policy::AttributeSet attributes;
  Bytes payload;
};

using SymmetricKey = AeadKey;

struct PolicyKeySlot {
  Digest policy_id{};
  Bytes encapsulated_key;

  friend bool operator==(const PolicyKeySlot&, const PolicyKeySlot&) = default;
};

absl::StatusOr<std::pair<PublicParams, MasterKey>> AbeSetup(
    SchemeId scheme, RandomSource& rng, int security_bits = 128);

absl::StatusOr<AttributeSecretKey> AbeKeyGen(
    const PublicParams& pp, const MasterKey& mk,
    const policy::AttributeSet& attributes, RandomSource& rng);

absl::StatusOr<std::pair<SymmetricKey, PolicyKeySlot>> Encapsulate(
    const PublicParams& pp, const policy::AccessTree& access,
    RandomSource& rng);

// DECAPSULATION_FAILURE if the key does not satisfy the slot's tree or the
// slot is corrupt.
absl::StatusOr<SymmetricKey> Decapsulate(const PublicParams& pp,
                                         const PolicyKeySlot& slot,
                                         const AttributeSecretKey& sk);

// Access tree carried in the clear by an encapsulated key.
absl::StatusOr<policy::AccessTree> SlotAccessTree(const PolicyKeySlot& slot);

// Key files: "PABE" || scheme id || kind || payload.
Bytes EncodePublicParams(const PublicParams& pp);
Bytes EncodeMasterKey(const MasterKey& mk);
Bytes EncodeSecretKey(const AttributeSecretKey& sk);
absl::StatusOr<PublicParams> DecodePublicParams(ByteView bytes);
absl::StatusOr<MasterKey> DecodeMasterKey(ByteView bytes);
absl::StatusOr<AttributeSecretKey> DecodeSecretKey(ByteView bytes);

inline constexpr size_t kSaltSize = 32;

struct NodeCiphertext {
  Digest policy_id{};
  AeadNonce nonce{};
  Bytes sealed;  // ciphertext || tag

  // policy_id || nonce || sealed
  Bytes Encode() const;
  static absl::StatusOr<NodeCiphertext> Decode(ByteView bytes);

  friend bool operator==(const NodeCiphertext&, const NodeCiphertext&) =
      default;
};

// Seals lp(salt) || lp(payload) under a fresh nonce; the policy id is bound
// as associated data.
NodeCiphertext EncryptNode(const SymmetricKey& key, const Digest& policy_id,
                           ByteView salt, ByteView payload,
                           RandomSource& rng = DefaultRandom());

struct NodePlaintext {
  Bytes salt;
  Bytes payload;
};
absl::StatusOr<NodePlaintext> DecryptNode(const SymmetricKey& key,
                                          const NodeCiphertext& ct);

}  // namespace petra::abe

#endif  // PETRA_ABE_ABKEM_H_
