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

// Symmetric ("Type A") bilinear group on the supersingular curve
//
//   E: y^2 = x^3 + x  over F_p,   p = 3 (mod 4),   #E(F_p) = p + 1 = h * r
//
// with |p| = 1535 bits and a 256-bit prime subgroup order r, giving an
// embedding-degree-2 pairing into F_{p^2} at roughly the 128-bit level.
// The pairing is the reduced Tate pairing composed with the distortion map
// (x, y) -> (-x, i*y), i^2 = -1.

#ifndef PETRA_ABE_TYPE_A_PAIRING_H_
#define PETRA_ABE_TYPE_A_PAIRING_H_

#include <gmpxx.h>

#include <span>
#include <utility>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"

namespace petra::abe::type_a {

inline constexpr size_t kFieldBytes = 192;
inline constexpr size_t kScalarBytes = 32;
// 0x02/0x03 parity prefix + x; 0x00 alone encodes the identity.
inline constexpr size_t kG1Bytes = 1 + kFieldBytes;
inline constexpr size_t kGtBytes = 2 * kFieldBytes;

const mpz_class& FieldPrime();
const mpz_class& GroupOrder();
const mpz_class& Cofactor();

// Element of F_{p^2} = F_p[i]/(i^2 + 1).
struct Fp2 {
  mpz_class re;
  mpz_class im;

  friend bool operator==(const Fp2&, const Fp2&) = default;
};

// Affine point of E(F_p).
struct G1 {
  mpz_class x;
  mpz_class y;
  bool infinity = true;

  friend bool operator==(const G1& a, const G1& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

// Element of the order-r subgroup of F_{p^2}^*.
struct Gt {
  Fp2 value;
  friend bool operator==(const Gt&, const Gt&) = default;
};

mpz_class RandomScalar(RandomSource& rng);  // uniform in [1, r)
mpz_class ScalarMod(const mpz_class& v);     // v mod r, non-negative
mpz_class ScalarInverse(const mpz_class& v);

G1 Add(const G1& a, const G1& b);
G1 Negate(const G1& a);
G1 Mul(const G1& point, const mpz_class& scalar);
bool IsOnCurve(const G1& point);

// Deterministic map to the order-r subgroup (try-and-increment followed by
// cofactor clearing). Results are memoized per input.
G1 HashToG1(ByteView data);
// A uniformly random non-identity point of the order-r subgroup.
G1 RandomG1(RandomSource& rng);

Gt Pair(const G1& a, const G1& b);

// Product of pairings e(a_i, b_i)^{e_i}. Inverses may be requested by
// passing negative exponents. Shares a single final exponentiation.
struct PairingTerm {
  const G1* a;
  const G1* b;
  mpz_class exponent;
};
Gt MultiPair(std::span<const PairingTerm> terms);

Gt GtOne();
Gt GtMul(const Gt& a, const Gt& b);
Gt GtInverse(const Gt& a);
Gt GtPow(const Gt& a, const mpz_class& exponent);

Bytes EncodeScalar(const mpz_class& v);
absl::StatusOr<mpz_class> DecodeScalar(ByteView bytes);
Bytes EncodeG1(const G1& point);
// Validates the point is on the curve and in the order-r subgroup.
absl::StatusOr<G1> DecodeG1(ByteView bytes);
Bytes EncodeGt(const Gt& element);
absl::StatusOr<Gt> DecodeGt(ByteView bytes);

}  // namespace petra::abe::type_a

#endif  // PETRA_ABE_TYPE_A_PAIRING_H_
