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

#include "petra/abe/type_a_pairing.h"

#include <gtest/gtest.h>

#include <chrono>
#include <vector>

namespace petra::abe::type_a {
namespace {

TEST(TypeAParamsTest, CurveOrderFactorsAsCofactorTimesPrimeOrder) {
  const mpz_class& p = FieldPrime();
  const mpz_class& r = GroupOrder();
  EXPECT_EQ(p + 1, Cofactor() * r);
  EXPECT_EQ(mpz_class(p % 4), 3);
  EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
  EXPECT_NE(mpz_probab_prime_p(r.get_mpz_t(), 30), 0);
  EXPECT_EQ(mpz_sizeinbase(r.get_mpz_t(), 2), 256u);
  EXPECT_GE(mpz_sizeinbase(p.get_mpz_t(), 2), 1535u);
}

TEST(TypeAGroupTest, HashedPointsLieInPrimeOrderSubgroup) {
  G1 g = HashToG1(AsBytes("generator"));
  EXPECT_FALSE(g.infinity);
  EXPECT_TRUE(IsOnCurve(g));
  EXPECT_TRUE(Mul(g, GroupOrder() - 1) == Negate(g));
  EXPECT_TRUE(Add(Mul(g, GroupOrder() - 1), g).infinity);
  EXPECT_TRUE(HashToG1(AsBytes("generator")) == g);
  EXPECT_FALSE(HashToG1(AsBytes("other")) == g);
}

TEST(TypeAGroupTest, ScalarMultiplicationIsLinear) {
  DeterministicRandom rng(7);
  G1 g = RandomG1(rng);
  mpz_class a = RandomScalar(rng);
  mpz_class b = RandomScalar(rng);
  EXPECT_TRUE(Add(Mul(g, a), Mul(g, b)) == Mul(g, a + b));
  EXPECT_TRUE(Mul(Mul(g, a), b) == Mul(g, a * b));
  // Doubling through the addition path.
  EXPECT_TRUE(Add(g, g) == Mul(g, 2));
}

TEST(TypeAPairingTest, BilinearAndNonDegenerate) {
  DeterministicRandom rng(11);
  G1 g = RandomG1(rng);
  G1 h = RandomG1(rng);
  mpz_class a = RandomScalar(rng);
  mpz_class b = RandomScalar(rng);

  Gt base = Pair(g, h);
  EXPECT_FALSE(base == GtOne());
  EXPECT_TRUE(GtPow(base, GroupOrder()) == GtOne());
  EXPECT_TRUE(Pair(Mul(g, a), Mul(h, b)) == GtPow(base, a * b));
  EXPECT_TRUE(Pair(Add(g, h), h) == GtMul(Pair(g, h), Pair(h, h)));
  // Symmetric group: e(g, h) == e(h, g).
  EXPECT_TRUE(Pair(h, g) == base);
  EXPECT_TRUE(Pair(G1{}, h) == GtOne());
}

TEST(TypeAPairingTest, MultiPairMatchesProductOfPairings) {
  DeterministicRandom rng(13);
  G1 a1 = RandomG1(rng), b1 = RandomG1(rng);
  G1 a2 = RandomG1(rng), b2 = RandomG1(rng);
  mpz_class e1 = RandomScalar(rng);
  std::vector<PairingTerm> terms = {{&a1, &b1, e1}, {&a2, &b2, mpz_class(-1)}};
  Gt expected =
      GtMul(GtPow(Pair(a1, b1), e1), GtInverse(Pair(a2, b2)));
  EXPECT_TRUE(MultiPair(terms) == expected);
}

TEST(TypeAEncodingTest, PointsAndTargetElementsRoundTrip) {
  DeterministicRandom rng(17);
  G1 g = RandomG1(rng);
  Bytes enc = EncodeG1(g);
  ASSERT_EQ(enc.size(), kG1Bytes);
  auto dec = DecodeG1(enc);
  ASSERT_TRUE(dec.ok()) << dec.status();
  EXPECT_TRUE(*dec == g);
  EXPECT_TRUE(*DecodeG1(EncodeG1(Negate(g))) == Negate(g));
  EXPECT_TRUE(DecodeG1(EncodeG1(G1{}))->infinity);

  Gt t = Pair(g, g);
  auto dt = DecodeGt(EncodeGt(t));
  ASSERT_TRUE(dt.ok());
  EXPECT_TRUE(*dt == t);

  Bytes bad = enc;
  bad[5] ^= 0x40;
  // Either not on the curve or not in the subgroup; both must be rejected
  // unless the flip happens to land on another subgroup point.
  auto rejected = DecodeG1(bad);
  if (rejected.ok()) EXPECT_FALSE(*rejected == g);
}

TEST(TypeAPairingTest, TimingIsInPracticalRange) {
  DeterministicRandom rng(19);
  G1 g = RandomG1(rng), h = RandomG1(rng);
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) Pair(g, h);
  auto pair_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start).count() / 5;
  start = std::chrono::steady_clock::now();
  mpz_class k = RandomScalar(rng);
  for (int i = 0; i < 5; ++i) Mul(g, k);
  auto mul_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start).count() / 5;
  RecordProperty("pairing_ms", std::to_string(pair_ms));
  RecordProperty("scalar_mul_ms", std::to_string(mul_ms));
  std::printf("pairing %.2f ms, scalar mul %.2f ms\n", pair_ms, mul_ms);
  EXPECT_LT(pair_ms, 500.0);
}

}  // namespace
}  // namespace petra::abe::type_a
