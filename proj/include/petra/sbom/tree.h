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

// Relational SBOM trees.
//
// An SBOM node carries the document index (a pURL) and redactable
// document-level data; complex nodes group composite claims (a package, a
// file, a relationship); field nodes hold one (name, value) claim each.

#ifndef PETRA_SBOM_TREE_H_
#define PETRA_SBOM_TREE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"

namespace petra::sbom {

enum class NodeKind : uint8_t {
  kField = 0x01,
  kComplex = 0x02,
  kSbom = 0x03,
  // Stand-in for a node the viewer could not decrypt. name holds the policy
  // id (hex), value the node's redacted hash (hex).
  kPlaceholder = 0x04,
};

enum class SourceFormat : uint8_t {
  kSpdx = 0x01,
  kCycloneDx = 0x02,
  kNative = 0x03,
};

std::string_view FormatName(SourceFormat format);
absl::StatusOr<SourceFormat> ParseFormatName(std::string_view name);

struct Node {
  NodeKind kind = NodeKind::kField;
  // Field: name. Complex: element type. Sbom: index pURL.
  std::string name;
  // Field: value. Sbom: document-level data. Complex: unused.
  std::string value;
  std::vector<Node> children;

  static Node Field(std::string name, std::string value);
  static Node Complex(std::string element_type, std::vector<Node> children = {});
  static Node Sbom(std::string index, std::string doc_meta,
                   std::vector<Node> children = {});
  static Node Placeholder(std::string policy_hex, std::string hash_hex,
                          std::vector<Node> children = {});

  bool is_field() const { return kind == NodeKind::kField; }
  bool is_complex() const { return kind == NodeKind::kComplex; }
  bool is_sbom() const { return kind == NodeKind::kSbom; }
  bool is_placeholder() const { return kind == NodeKind::kPlaceholder; }

  // Path segment used by selectors: "sbom" for SBOM nodes, "?" for
  // placeholders, the name / element type otherwise.
  std::string_view Segment() const;

  friend bool operator==(const Node&, const Node&) = default;
};

struct SbomTree {
  Node root;
  SourceFormat format = SourceFormat::kNative;

  friend bool operator==(const SbomTree&, const SbomTree&) = default;
};

// Structural invariants: SBOM root with a valid pURL index, non-empty
// names and element types, childless fields.
absl::Status ValidateTree(const SbomTree& tree);

// Preorder index of a node; stable for a given tree shape.
using NodeId = size_t;

struct NodeRef {
  NodeId id;
  const Node* node;
  // Ancestors from the root down to (excluding) this node.
  const std::vector<const Node*>* ancestors;
  // Position among the parent's children (0 for the root).
  size_t position;
};

// Preorder traversal.
void ForEachNode(const Node& root, const std::function<void(const NodeRef&)>& fn);
size_t CountNodes(const Node& root);

// Dotted segment path from the root to the node, e.g. "sbom.package.name".
std::string PathString(const NodeRef& ref);

// (path, value) for every field node, in preorder. Nested SBOM roots
// contribute their own paths.
std::vector<std::pair<std::string, std::string>> FieldPairs(const Node& root);

absl::StatusOr<SourceFormat> DetectFormat(ByteView document);

// Ingests SPDX 2.3 / CycloneDX 1.x JSON, or the native encoding.
absl::StatusOr<SbomTree> ParseSbom(ByteView document, SourceFormat format);

// Native encoding: "PTRE" || version || format || node, where
//   node := tag || lp(name) || [lp(value)] || u32 child count || children
// and the value is present for field, SBOM and placeholder nodes.
Bytes SerializeTree(const SbomTree& tree);
absl::StatusOr<SbomTree> ParseNative(ByteView bytes);

// Emits an SPDX or CycloneDX JSON document. Placeholders become
// {"petra:redacted": {...}} members; nested SBOMs and fields the target
// schema does not know go under "x-petra-extensions".
absl::StatusOr<std::string> ExportPlaintext(const SbomTree& tree,
                                            SourceFormat format);

// Generic JSON rendering of a tree (kind/name/value/children), for
// inspection output.
std::string TreeToJson(const Node& root, int indent = 2);

}  // namespace petra::sbom

#endif  // PETRA_SBOM_TREE_H_
