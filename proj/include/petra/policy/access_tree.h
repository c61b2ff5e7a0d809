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

#ifndef PETRA_POLICY_ACCESS_TREE_H_
#define PETRA_POLICY_ACCESS_TREE_H_

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"

namespace petra::policy {

// Attributes are namespaced opaque strings such as "user:foo",
// "namespace:bar.com" or "expiry:2025-06". Matching is exact.
using AttributeSet = std::set<std::string>;

bool IsValidAttribute(std::string_view attribute);

// Calendar month, the granularity of key expiry windows.
struct YearMonth {
  int year = 1970;
  int month = 1;

  static absl::StatusOr<YearMonth> Parse(std::string_view text);  // YYYY-MM
  static YearMonth FromUnixSeconds(int64_t seconds);              // UTC
  static YearMonth Now();
  std::string ToString() const;
  YearMonth Next() const;
  std::string ExpiryAttribute() const { return "expiry:" + ToString(); }

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

// Threshold-gate tree over attribute leaves. AND over n children is an n-of-n
// gate, OR is 1-of-n.
class AccessTree {
 public:
  static AccessTree Leaf(std::string attribute);
  // Caller guarantees 1 <= k <= children.size(); see Validate().
  static AccessTree Gate(int threshold, std::vector<AccessTree> children);
  static AccessTree And(std::vector<AccessTree> children);
  static AccessTree Or(std::vector<AccessTree> children);

  bool is_leaf() const { return threshold_ == 0; }
  const std::string& attribute() const { return attribute_; }
  int threshold() const { return threshold_; }
  const std::vector<AccessTree>& children() const { return children_; }

  // Number of attribute leaves.
  size_t LeafCount() const;
  // Checks gate thresholds and attribute syntax.
  absl::Status Validate() const;

  friend bool operator==(const AccessTree&, const AccessTree&) = default;

 private:
  int threshold_ = 0;
  std::string attribute_;
  std::vector<AccessTree> children_;
};

// Infix grammar:
//   expr   := term ("OR" term)*
//   term   := factor ("AND" factor)*
//   factor := attribute | "(" expr ")" | K "of" "(" expr ("," expr)* ")"
// AND binds tighter than OR; chains of one operator become a single gate.
absl::StatusOr<AccessTree> ParseAccessExpression(std::string_view text);
std::string ToExpression(const AccessTree& tree);

// Canonical encoding (the A_n bytes bound into node hashes):
//   leaf: 0x01 || lp(attribute)
//   gate: 0x02 || u32 k || u32 n || child encodings
Bytes EncodeAccessTree(const AccessTree& tree);
absl::StatusOr<AccessTree> DecodeAccessTree(ByteView bytes);
absl::StatusOr<AccessTree> DecodeAccessTree(ByteReader& reader);

// SHA-256 of the canonical encoding.
Digest PolicyId(const AccessTree& tree);

// Recursive threshold evaluation with exact attribute matching.
bool Satisfies(const AccessTree& tree, const AttributeSet& attributes);
// As above, but "expiry:YYYY-MM" attributes whose window lies before `now`
// are treated as absent.
bool Satisfies(const AccessTree& tree, const AttributeSet& attributes,
               YearMonth now);

}  // namespace petra::policy

#endif  // PETRA_POLICY_ACCESS_TREE_H_
