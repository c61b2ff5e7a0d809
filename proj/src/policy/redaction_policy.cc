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

#include "petra/policy/redaction_policy.h"

#include <cctype>

#include <nlohmann/json.hpp>

#include "petra/common/error.h"

namespace petra::policy {
namespace {

using sbom::Node;
using sbom::NodeRef;

absl::Status Syntax(std::string_view what) {
  return Error(ErrorCode::kPolicySyntax, what);
}

// "creators[3]" -> "creators"; other names unchanged.
std::string_view StripIndex(std::string_view segment) {
  if (!segment.ends_with("]")) return segment;
  size_t open = segment.rfind('[');
  if (open == std::string_view::npos || open == 0) return segment;
  return segment.substr(0, open);
}

size_t OrdinalAmongSiblings(const Node& parent, const Node* child) {
  size_t ordinal = 0;
  const std::string_view segment = child->Segment();
  for (const Node& sibling : parent.children) {
    if (&sibling == child) break;
    if (sibling.Segment() == segment) ++ordinal;
  }
  return ordinal;
}

absl::StatusOr<AccessTree> ParseAccessField(const nlohmann::json& value,
                                            std::string_view field) {
  if (!value.is_string()) {
    return Syntax(std::string(field) + " must be an access expression string");
  }
  return ParseAccessExpression(value.get<std::string>());
}

}  // namespace

absl::StatusOr<PathSelector> PathSelector::Parse(std::string_view text) {
  if (text.empty()) return Syntax("empty path selector");
  PathSelector selector;
  selector.text_ = std::string(text);
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('.', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view part = text.substr(start, end - start);
    if (part.empty()) {
      return Syntax("empty segment in selector \"" + std::string(text) + "\"");
    }
    Segment seg;
    if (part == "**") {
      seg.kind = Segment::Kind::kRecursive;
    } else if (part == "*") {
      seg.kind = Segment::Kind::kAny;
    } else {
      seg.kind = Segment::Kind::kLiteral;
      size_t hash = part.rfind('#');
      if (hash != std::string_view::npos) {
        std::string_view digits = part.substr(hash + 1);
        if (digits.empty() || hash == 0) {
          return Syntax("bad ordinal in selector \"" + std::string(text) + "\"");
        }
        size_t ordinal = 0;
        for (char c : digits) {
          if (!std::isdigit(static_cast<unsigned char>(c))) {
            return Syntax("bad ordinal in selector \"" + std::string(text) +
                          "\"");
          }
          ordinal = ordinal * 10 + static_cast<size_t>(c - '0');
        }
        seg.ordinal = ordinal;
        part = part.substr(0, hash);
      }
      if (part.find('*') != std::string_view::npos) {
        return Syntax("partial wildcards are not supported: \"" +
                      std::string(text) + "\"");
      }
      seg.literal = std::string(part);
    }
    selector.segments_.push_back(std::move(seg));
    start = end + 1;
  }
  return selector;
}

bool PathSelector::SegmentMatches(const Segment& s, const PathEntry& e) {
  if (s.kind != Segment::Kind::kLiteral) return true;
  if (s.ordinal.has_value() && *s.ordinal != e.ordinal) return false;
  return e.segment == s.literal || StripIndex(e.segment) == s.literal;
}

bool PathSelector::MatchFrom(size_t si, const std::vector<PathEntry>& path,
                             size_t pi) const {
  if (si == segments_.size()) return pi == path.size();
  const Segment& s = segments_[si];
  if (s.kind == Segment::Kind::kRecursive) {
    for (size_t skip = pi; skip <= path.size(); ++skip) {
      if (MatchFrom(si + 1, path, skip)) return true;
    }
    return false;
  }
  return pi < path.size() && SegmentMatches(s, path[pi]) &&
         MatchFrom(si + 1, path, pi + 1);
}

bool PathSelector::Matches(const NodeRef& ref) const {
  const auto& ancestors = *ref.ancestors;
  std::vector<PathEntry> path;
  path.reserve(ancestors.size() + 1);
  for (size_t i = 0; i < ancestors.size(); ++i) {
    const size_t ordinal =
        i == 0 ? 0 : OrdinalAmongSiblings(*ancestors[i - 1], ancestors[i]);
    path.push_back({ancestors[i]->Segment(), ordinal});
  }
  const size_t ordinal =
      ancestors.empty() ? 0 : OrdinalAmongSiblings(*ancestors.back(), ref.node);
  path.push_back({ref.node->Segment(), ordinal});
  return MatchFrom(0, path, 0);
}

std::vector<sbom::NodeId> SelectNodes(const PathSelector& selector,
                                      const Node& root) {
  std::vector<sbom::NodeId> out;
  sbom::ForEachNode(root, [&](const NodeRef& ref) {
    if (selector.Matches(ref)) out.push_back(ref.id);
  });
  return out;
}

absl::StatusOr<RedactionPolicy> ParsePolicy(ByteView document) {
  nlohmann::json doc =
      nlohmann::json::parse(document.begin(), document.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Syntax("policy is not a JSON object");
  }
  RedactionPolicy policy;
  if (doc.contains("rules")) {
    if (!doc["rules"].is_array()) return Syntax("\"rules\" must be an array");
    for (const auto& rule_json : doc["rules"]) {
      if (!rule_json.is_object() || !rule_json.contains("paths") ||
          !rule_json.contains("access")) {
        return Syntax("each rule needs \"paths\" and \"access\"");
      }
      RedactionRule rule;
      const auto& paths = rule_json["paths"];
      if (!paths.is_array() || paths.empty()) {
        return Syntax("\"paths\" must be a non-empty array");
      }
      for (const auto& p : paths) {
        if (!p.is_string()) return Syntax("paths must be strings");
        PETRA_ASSIGN_OR_RETURN(PathSelector selector,
                               PathSelector::Parse(p.get<std::string>()));
        rule.paths.push_back(std::move(selector));
      }
      PETRA_ASSIGN_OR_RETURN(rule.access,
                             ParseAccessField(rule_json["access"], "access"));
      policy.rules.push_back(std::move(rule));
    }
  }
  if (doc.contains("nodes")) {
    if (!doc["nodes"].is_object()) return Syntax("\"nodes\" must be an object");
    for (const auto& [key, access] : doc["nodes"].items()) {
      sbom::NodeId id = 0;
      if (key.empty() || key.size() > 9 ||
          key.find_first_not_of("0123456789") != std::string::npos) {
        return Syntax("\"nodes\" keys must be preorder ids");
      }
      id = std::stoul(key);
      PETRA_ASSIGN_OR_RETURN(AccessTree tree, ParseAccessField(access, "nodes"));
      policy.node_access.emplace(id, std::move(tree));
    }
  }
  const std::string visibility = doc.value("default", std::string("public"));
  if (visibility == "public") {
    policy.default_visibility = Visibility::kPublic;
  } else if (visibility == "deny") {
    policy.default_visibility = Visibility::kDenyAll;
  } else {
    return Syntax("\"default\" must be \"public\" or \"deny\"");
  }
  if (doc.contains("producer")) {
    if (!doc["producer"].is_string()) return Syntax("producer must be a string");
    policy.producer = doc["producer"].get<std::string>();
  }
  if (policy.default_visibility == Visibility::kDenyAll &&
      !IsValidAttribute("user:" + policy.producer)) {
    return Syntax("\"default\": \"deny\" needs a valid \"producer\" id");
  }
  if (doc.contains("verifier_or")) {
    PETRA_ASSIGN_OR_RETURN(policy.verifier_or,
                           ParseAccessField(doc["verifier_or"], "verifier_or"));
  }
  if (doc.contains("enforce_expiry")) {
    if (!doc["enforce_expiry"].is_boolean()) {
      return Syntax("enforce_expiry must be a boolean");
    }
    policy.enforce_expiry = doc["enforce_expiry"].get<bool>();
  }
  if (doc.contains("expiry_window")) {
    if (!doc["expiry_window"].is_string()) {
      return Syntax("expiry_window must be \"YYYY-MM\"");
    }
    PETRA_ASSIGN_OR_RETURN(
        policy.expiry_window,
        YearMonth::Parse(doc["expiry_window"].get<std::string>()));
  }
  return policy;
}

AccessTree EffectiveAccess(const RedactionPolicy& policy,
                           const AccessTree& access, YearMonth now) {
  AccessTree tree = access;
  if (policy.verifier_or.has_value()) {
    if (!tree.is_leaf() && tree.threshold() == 1) {
      std::vector<AccessTree> children = tree.children();
      children.push_back(*policy.verifier_or);
      tree = AccessTree::Or(std::move(children));
    } else {
      tree = AccessTree::Or({std::move(tree), *policy.verifier_or});
    }
  }
  if (policy.enforce_expiry) {
    const YearMonth window = policy.expiry_window.value_or(now);
    tree = AccessTree::And(
        {std::move(tree), AccessTree::Leaf(window.ExpiryAttribute())});
  }
  return tree;
}

std::vector<Assignment> ResolvePolicy(const RedactionPolicy& policy,
                                      const Node& root, YearMonth now) {
  std::vector<Assignment> out;
  std::vector<AccessTree> effective;
  effective.reserve(policy.rules.size());
  for (const RedactionRule& rule : policy.rules) {
    effective.push_back(EffectiveAccess(policy, rule.access, now));
  }
  Assignment fallback;
  if (policy.default_visibility == Visibility::kDenyAll) {
    fallback = EffectiveAccess(
        policy, AccessTree::Leaf("user:" + policy.producer), now);
  }
  sbom::ForEachNode(root, [&](const NodeRef& ref) {
    if (auto it = policy.node_access.find(ref.id);
        it != policy.node_access.end()) {
      out.push_back(EffectiveAccess(policy, it->second, now));
      return;
    }
    for (size_t i = 0; i < policy.rules.size(); ++i) {
      for (const PathSelector& selector : policy.rules[i].paths) {
        if (selector.Matches(ref)) {
          out.push_back(effective[i]);
          return;
        }
      }
    }
    out.push_back(fallback);
  });
  return out;
}

absl::StatusOr<SyntheticPolicy> ParseSyntheticPolicyName(
    std::string_view name) {
  if (name == "complicated") return SyntheticPolicy::kComplicated;
  if (name == "simplistic") return SyntheticPolicy::kSimplistic;
  return Syntax("unknown synthetic policy \"" + std::string(name) + "\"");
}

RedactionPolicy SynthesizePolicy(SyntheticPolicy kind, const Node& root) {
  RedactionPolicy policy;
  size_t fields = 0;
  sbom::ForEachNode(root, [&](const NodeRef& ref) {
    if (!ref.node->is_field()) return;
    std::string attribute =
        kind == SyntheticPolicy::kComplicated
            ? "prop:n" + std::to_string(ref.id)
            : (fields % 2 == 0 ? "tier:a" : "tier:b");
    policy.node_access.emplace(ref.id, AccessTree::Leaf(std::move(attribute)));
    ++fields;
  });
  return policy;
}

}  // namespace petra::policy
