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

#ifndef PETRA_POLICY_REDACTION_POLICY_H_
#define PETRA_POLICY_REDACTION_POLICY_H_

#include <optional>
#include <string>
#include <map>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/policy/access_tree.h"
#include "petra/sbom/tree.h"

namespace petra::policy {

// Dot-separated selector over node segments from the root, e.g.
// "**.version", "sbom.package.*", "**.file#2.checksum". Segments:
//   literal   matches a segment exactly, or a field name "literal[i]"
//   *         matches one segment
//   **        matches zero or more segments
// A "#n" suffix on a literal restricts it to the n-th (0-based) sibling
// carrying that segment.
class PathSelector {
 public:
  static absl::StatusOr<PathSelector> Parse(std::string_view text);

  bool Matches(const sbom::NodeRef& ref) const;
  const std::string& text() const { return text_; }

 private:
  struct Segment {
    enum class Kind { kLiteral, kAny, kRecursive } kind;
    std::string literal;
    std::optional<size_t> ordinal;
  };
  struct PathEntry {
    std::string_view segment;
    size_t ordinal;
  };

  bool MatchFrom(size_t si, const std::vector<PathEntry>& path,
                 size_t pi) const;
  static bool SegmentMatches(const Segment& s, const PathEntry& e);

  std::string text_;
  std::vector<Segment> segments_;
};

// Nodes matched by `selector` in preorder.
std::vector<sbom::NodeId> SelectNodes(const PathSelector& selector,
                                      const sbom::Node& root);

enum class Visibility { kPublic, kDenyAll };

struct RedactionRule {
  std::vector<PathSelector> paths;
  AccessTree access;
};

struct RedactionPolicy {
  std::vector<RedactionRule> rules;
  // Per-node access by preorder id; takes precedence over `rules`.
  std::map<sbom::NodeId, AccessTree> node_access;
  Visibility default_visibility = Visibility::kPublic;
  std::string producer;                   // required for kDenyAll
  std::optional<AccessTree> verifier_or;  // OR-ed into every access tree
  bool enforce_expiry = false;
  std::optional<YearMonth> expiry_window;  // defaults to the current month
};

// Policy JSON:
//   {"rules": [{"paths": [...], "access": "<expression>"}],
//    "default": "public" | "deny", "producer": "<id>",
//    "verifier_or": "<expression>", "enforce_expiry": bool,
//    "expiry_window": "YYYY-MM", "nodes": {"<preorder id>": "<expression>"}}
absl::StatusOr<RedactionPolicy> ParsePolicy(ByteView document);

// Access tree as finally applied: (access OR verifier) AND expiry:<window>.
AccessTree EffectiveAccess(const RedactionPolicy& policy,
                           const AccessTree& access, YearMonth now);

// One entry per node in preorder: the access tree, or nullopt for public.
// First matching rule wins; unmatched nodes follow the default visibility,
// where deny compiles to user:<producer>.
using Assignment = std::optional<AccessTree>;
std::vector<Assignment> ResolvePolicy(const RedactionPolicy& policy,
                                      const sbom::Node& root,
                                      YearMonth now = YearMonth::Now());

// Generated evaluation policies over the fields of one tree.
enum class SyntheticPolicy {
  kComplicated,  // every field under its own attribute prop:n<id>
  kSimplistic,   // fields alternate between tier:a and tier:b
};
absl::StatusOr<SyntheticPolicy> ParseSyntheticPolicyName(std::string_view name);
RedactionPolicy SynthesizePolicy(SyntheticPolicy kind, const sbom::Node& root);

}  // namespace petra::policy

#endif  // PETRA_POLICY_REDACTION_POLICY_H_
