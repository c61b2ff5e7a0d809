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

#include "petra/policy/access_tree.h"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "petra/common/error.h"

namespace petra::policy {
namespace {

AttributeSet Subset(const std::vector<std::string>& universe, unsigned mask) {
  AttributeSet out;
  for (size_t i = 0; i < universe.size(); ++i) {
    if (mask & (1u << i)) out.insert(universe[i]);
  }
  return out;
}

TEST(ParseAccessExpressionTest, ScannerAuditorAgencyGate) {
  auto tree = ParseAccessExpression(
      "(role:scanner AND cert:fedramp) OR role:auditor OR org:federal");
  ASSERT_TRUE(tree.ok()) << tree.status();
  ASSERT_FALSE(tree->is_leaf());
  EXPECT_EQ(tree->threshold(), 1);
  ASSERT_EQ(tree->children().size(), 3u);
  const AccessTree& conj = tree->children()[0];
  EXPECT_EQ(conj.threshold(), 2);
  ASSERT_EQ(conj.children().size(), 2u);
  EXPECT_EQ(conj.children()[0].attribute(), "role:scanner");
  EXPECT_EQ(conj.children()[1].attribute(), "cert:fedramp");
  EXPECT_EQ(tree->children()[1].attribute(), "role:auditor");
  EXPECT_EQ(tree->children()[2].attribute(), "org:federal");

  EXPECT_TRUE(Satisfies(*tree, {"role:auditor"}));
  EXPECT_TRUE(Satisfies(*tree, {"role:scanner", "cert:fedramp"}));
  EXPECT_FALSE(Satisfies(*tree, {"role:scanner"}));
  EXPECT_FALSE(Satisfies(*tree, {}));
}

TEST(ParseAccessExpressionTest, AndBindsTighterAndKeywordsAreCaseInsensitive) {
  auto tree = ParseAccessExpression("a:x or b:y And c:z");
  ASSERT_TRUE(tree.ok());
  EXPECT_EQ(ToExpression(*tree), "(a:x OR (b:y AND c:z))");
  auto chain = ParseAccessExpression("a:x AND b:y AND c:z");
  ASSERT_TRUE(chain.ok());
  EXPECT_EQ(chain->threshold(), 3);
  EXPECT_EQ(chain->children().size(), 3u);
}

TEST(ParseAccessExpressionTest, ThresholdGateMatchesBruteForceTable) {
  auto tree = ParseAccessExpression("2of(a:x,b:y,c:z)");
  ASSERT_TRUE(tree.ok());
  EXPECT_EQ(tree->threshold(), 2);
  EXPECT_EQ(tree->LeafCount(), 3u);
  const std::vector<std::string> universe = {"a:x", "b:y", "c:z"};
  for (unsigned mask = 0; mask < 8; ++mask) {
    const bool expected = __builtin_popcount(mask) >= 2;
    EXPECT_EQ(Satisfies(*tree, Subset(universe, mask)), expected) << mask;
  }
  // "2 of (...)" spelling.
  auto spaced = ParseAccessExpression("2 of (a:x, b:y, c:z)");
  ASSERT_TRUE(spaced.ok());
  EXPECT_EQ(*spaced, *tree);
}

TEST(ParseAccessExpressionTest, RejectsMalformedInput) {
  EXPECT_TRUE(HasErrorCode(ParseAccessExpression(""), ErrorCode::kPolicySyntax));
  EXPECT_TRUE(
      HasErrorCode(ParseAccessExpression("a:x AND"), ErrorCode::kPolicySyntax));
  EXPECT_TRUE(
      HasErrorCode(ParseAccessExpression("(a:x"), ErrorCode::kPolicySyntax));
  EXPECT_TRUE(
      HasErrorCode(ParseAccessExpression("noColon"), ErrorCode::kPolicySyntax));
  EXPECT_TRUE(
      HasErrorCode(ParseAccessExpression("A:x"), ErrorCode::kPolicySyntax));
  EXPECT_TRUE(HasErrorCode(ParseAccessExpression("a:x $ b:y"),
                           ErrorCode::kPolicySyntax));
  EXPECT_TRUE(
      HasErrorCode(ParseAccessExpression("2of()"), ErrorCode::kEmptyGate));
  EXPECT_TRUE(HasErrorCode(ParseAccessExpression("0of(a:x)"),
                           ErrorCode::kBadThreshold));
  EXPECT_TRUE(HasErrorCode(ParseAccessExpression("3of(a:x,b:y)"),
                           ErrorCode::kBadThreshold));
}

TEST(AccessTreeTest, ValidateCatchesBadGates) {
  EXPECT_TRUE(HasErrorCode(AccessTree::Gate(1, {}).Validate(),
                           ErrorCode::kEmptyGate));
  EXPECT_TRUE(HasErrorCode(
      AccessTree::Gate(2, {AccessTree::Leaf("a:x")}).Validate(),
      ErrorCode::kBadThreshold));
  EXPECT_TRUE(AccessTree::Or({AccessTree::Leaf("a:x")}).Validate().ok());
}

TEST(AccessTreeEncodingTest, LeafEncodingIsTagAndLengthPrefix) {
  Bytes enc = EncodeAccessTree(AccessTree::Leaf("a:x"));
  Bytes expected = {0x01, 0x00, 0x00, 0x00, 0x03, 'a', ':', 'x'};
  EXPECT_EQ(enc, expected);
  Bytes gate = EncodeAccessTree(
      AccessTree::Gate(1, {AccessTree::Leaf("a:x"), AccessTree::Leaf("b:y")}));
  Bytes gate_expected = {0x02, 0, 0, 0, 1, 0, 0, 0, 2};
  gate_expected.insert(gate_expected.end(), expected.begin(), expected.end());
  for (uint8_t b : Bytes{0x01, 0, 0, 0, 3, 'b', ':', 'y'}) {
    gate_expected.push_back(b);
  }
  EXPECT_EQ(gate, gate_expected);
}

TEST(AccessTreeEncodingTest, RoundTripsAndPolicyIdIsStable) {
  auto tree = ParseAccessExpression("2of(a:x, b:y AND c:z, d:w OR e:v)");
  ASSERT_TRUE(tree.ok());
  Bytes enc = EncodeAccessTree(*tree);
  auto decoded = DecodeAccessTree(enc);
  ASSERT_TRUE(decoded.ok()) << decoded.status();
  EXPECT_EQ(*decoded, *tree);
  EXPECT_EQ(PolicyId(*decoded), Sha256(enc));
  EXPECT_NE(PolicyId(*tree), PolicyId(AccessTree::Leaf("a:x")));

  Bytes truncated(enc.begin(), enc.end() - 1);
  EXPECT_FALSE(DecodeAccessTree(truncated).ok());
  Bytes trailing = enc;
  trailing.push_back(0);
  EXPECT_FALSE(DecodeAccessTree(trailing).ok());
}

// Random depth <= 2 trees over a small universe.
AccessTree RandomTree(std::mt19937& gen, const std::vector<std::string>& u,
                      int depth) {
  std::uniform_int_distribution<int> coin(0, 2);
  if (depth == 0 || coin(gen) == 0) {
    return AccessTree::Leaf(u[gen() % u.size()]);
  }
  const int n = 1 + static_cast<int>(gen() % 3);
  std::vector<AccessTree> children;
  for (int i = 0; i < n; ++i) children.push_back(RandomTree(gen, u, depth - 1));
  return AccessTree::Gate(1 + static_cast<int>(gen() % n), std::move(children));
}

TEST(SatisfiesPropertyTest, MonotoneInAttributes) {
  const std::vector<std::string> universe = {"a:x", "b:y", "c:z", "d:w"};
  std::mt19937 gen(1234);
  for (int trial = 0; trial < 200; ++trial) {
    AccessTree tree = RandomTree(gen, universe, 2);
    for (unsigned small = 0; small < 16; ++small) {
      for (unsigned big = 0; big < 16; ++big) {
        if ((small & big) != small) continue;
        if (Satisfies(tree, Subset(universe, small))) {
          EXPECT_TRUE(Satisfies(tree, Subset(universe, big)))
              << ToExpression(tree);
        }
      }
    }
  }
}

TEST(SatisfiesPropertyTest, OneOfIsOrAndNOfNIsAnd) {
  const std::vector<std::string> universe = {"a:x", "b:y", "c:z", "d:w"};
  for (size_t n = 1; n <= 4; ++n) {
    std::vector<AccessTree> leaves;
    for (size_t i = 0; i < n; ++i) leaves.push_back(AccessTree::Leaf(universe[i]));
    AccessTree any = AccessTree::Gate(1, leaves);
    AccessTree all = AccessTree::Gate(static_cast<int>(n), leaves);
    for (unsigned mask = 0; mask < 16; ++mask) {
      AttributeSet attrs = Subset(universe, mask);
      bool or_value = false, and_value = true;
      for (size_t i = 0; i < n; ++i) {
        or_value = or_value || attrs.contains(universe[i]);
        and_value = and_value && attrs.contains(universe[i]);
      }
      EXPECT_EQ(Satisfies(any, attrs), or_value);
      EXPECT_EQ(Satisfies(all, attrs), and_value);
    }
  }
}

TEST(YearMonthTest, ParsesFormatsAndOrders) {
  auto ym = YearMonth::Parse("2025-06");
  ASSERT_TRUE(ym.ok());
  EXPECT_EQ(ym->year, 2025);
  EXPECT_EQ(ym->month, 6);
  EXPECT_EQ(ym->ToString(), "2025-06");
  EXPECT_EQ(ym->Next().ToString(), "2025-07");
  EXPECT_EQ((YearMonth{2025, 12}.Next().ToString()), "2026-01");
  EXPECT_LT(*ym, ym->Next());
  EXPECT_FALSE(YearMonth::Parse("2025-13").ok());
  EXPECT_FALSE(YearMonth::Parse("2025-6").ok());
  EXPECT_FALSE(YearMonth::Parse("2025-06x").ok());
  // 2025-06-15T12:00:00Z
  EXPECT_EQ(YearMonth::FromUnixSeconds(1749988800).ToString(), "2025-06");
}

TEST(SatisfiesTest, StaleExpiryAttributesAreIgnored) {
  AccessTree tree = AccessTree::And(
      {AccessTree::Leaf("namespace:bar.com"), AccessTree::Leaf("expiry:2025-06")});
  AttributeSet attrs = {"namespace:bar.com", "expiry:2025-06"};
  EXPECT_TRUE(Satisfies(tree, attrs));
  EXPECT_TRUE(Satisfies(tree, attrs, YearMonth{2025, 6}));
  EXPECT_TRUE(Satisfies(tree, attrs, YearMonth{2025, 5}));
  EXPECT_FALSE(Satisfies(tree, attrs, YearMonth{2025, 7}));
}

}  // namespace
}  // namespace petra::policy
