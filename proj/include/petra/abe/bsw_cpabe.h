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

// Bethencourt-Sahai-Waters ciphertext-policy ABE, used as a key encapsulation
// mechanism over the symmetric Type-A pairing.
//
//   PP = (g, h = g^beta, f = g^(1/beta), e(g,g)^alpha)    MK = (beta, g^alpha)
//   SK = (D = g^((alpha + r)/beta), {D_j = g^r H(j)^r_j, D'_j = g^r_j})
//   CT = (tree, C = h^s, {C_y = g^q_y(0), C'_y = H(att(y))^q_y(0)})
//
// The encapsulated secret is e(g,g)^(alpha s); the C~ = M e(g,g)^(alpha s)
// component of the encryption scheme is not needed.

#ifndef PETRA_ABE_BSW_CPABE_H_
#define PETRA_ABE_BSW_CPABE_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/abe/type_a_pairing.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"
#include "petra/policy/access_tree.h"

namespace petra::abe::bsw {

using type_a::G1;
using type_a::Gt;

struct PublicParams {
  G1 g;
  G1 h;
  G1 f;
  Gt egg_alpha;
};

struct MasterKey {
  mpz_class beta;
  G1 g_alpha;
};

struct SecretKey {
  struct Component {
    std::string attribute;
    G1 d;        // g^r H(j)^r_j
    G1 d_prime;  // g^r_j
  };
  G1 d;
  std::vector<Component> components;

  policy::AttributeSet Attributes() const;
};

struct Ciphertext {
  struct Leaf {
    G1 c;        // g^q_y(0)
    G1 c_prime;  // H(att(y))^q_y(0)
  };
  policy::AccessTree tree;
  G1 c;                     // h^s
  std::vector<Leaf> leaves;  // access-tree leaves in preorder
};

std::pair<PublicParams, MasterKey> Setup(RandomSource& rng);
absl::StatusOr<SecretKey> KeyGen(const PublicParams& pp, const MasterKey& mk,
                                 const policy::AttributeSet& attributes,
                                 RandomSource& rng);
// Returns the ciphertext and the encapsulated group element e(g,g)^(alpha s).
std::pair<Ciphertext, Gt> Encapsulate(const PublicParams& pp,
                                      const policy::AccessTree& tree,
                                      RandomSource& rng);
// Recovers e(g,g)^(alpha s). Fails with DECAPSULATION_FAILURE when the key's
// attributes do not satisfy the ciphertext tree.
absl::StatusOr<Gt> Decapsulate(const Ciphertext& ct, const SecretKey& sk);
// Same result as decoding both inputs and calling Decapsulate, but only the
// points on the chosen decryption path are decompressed and validated.
absl::StatusOr<Gt> DecapsulateEncoded(ByteView ciphertext, ByteView secret_key);

// Building blocks of Decapsulate, exposed for transcript-level tests.
//   LeafTranscript = e(D_j, C_y) / e(D'_j, C'_y) = e(g,g)^(r q_y(0))
//   Unlock         = e(C, D) / prod(transcript_y ^ lambda_y)
// where lambda_y are the Lagrange coefficients of a satisfying leaf set.
Gt LeafTranscript(const SecretKey::Component& component,
                  const Ciphertext::Leaf& leaf);
absl::StatusOr<Gt> Unlock(const Ciphertext& ct, const G1& d,
                          const std::map<size_t, Gt>& transcripts);

Bytes EncodePublicParams(const PublicParams& pp);
absl::StatusOr<PublicParams> DecodePublicParams(ByteView bytes);
Bytes EncodeMasterKey(const MasterKey& mk);
absl::StatusOr<MasterKey> DecodeMasterKey(ByteView bytes);
Bytes EncodeSecretKey(const SecretKey& sk);
absl::StatusOr<SecretKey> DecodeSecretKey(ByteView bytes);
Bytes EncodeCiphertext(const Ciphertext& ct);
absl::StatusOr<Ciphertext> DecodeCiphertext(ByteView bytes);

}  // namespace petra::abe::bsw

#endif  // PETRA_ABE_BSW_CPABE_H_
