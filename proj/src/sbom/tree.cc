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

#include "petra/sbom/tree.h"

#include <nlohmann/json.hpp>

#include "petra/common/error.h"
#include "petra/sbom/purl.h"

namespace petra::sbom {
namespace {

constexpr std::string_view kNativeMagic = "PTRE";
constexpr uint8_t kNativeVersion = 1;
constexpr int kMaxDepth = 256;

bool HasValue(NodeKind kind) { return kind != NodeKind::kComplex; }

void EncodeNode(const Node& node, ByteWriter& out) {
  out.U8(static_cast<uint8_t>(node.kind)).Lp(node.name);
  if (HasValue(node.kind)) out.Lp(node.value);
  out.U32(static_cast<uint32_t>(node.children.size()));
  for (const Node& child : node.children) EncodeNode(child, out);
}

absl::StatusOr<Node> DecodeNode(ByteReader& in, int depth) {
  if (depth > kMaxDepth) {
    return Error(ErrorCode::kMalformedDocument, "tree nested too deeply");
  }
  PETRA_ASSIGN_OR_RETURN(uint8_t tag, in.U8());
  if (tag < 0x01 || tag > 0x04) {
    return Error(ErrorCode::kMalformedDocument, "unknown node tag");
  }
  Node node;
  node.kind = static_cast<NodeKind>(tag);
  PETRA_ASSIGN_OR_RETURN(node.name, in.LpString());
  if (HasValue(node.kind)) {
    PETRA_ASSIGN_OR_RETURN(node.value, in.LpString());
  }
  PETRA_ASSIGN_OR_RETURN(uint32_t n, in.U32());
  if (n > in.remaining()) {
    return Error(ErrorCode::kMalformedDocument, "truncated tree");
  }
  node.children.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    PETRA_ASSIGN_OR_RETURN(Node child, DecodeNode(in, depth + 1));
    node.children.push_back(std::move(child));
  }
  return node;
}

absl::Status ValidateNode(const Node& node, bool is_root) {
  switch (node.kind) {
    case NodeKind::kField:
      if (node.name.empty()) {
        return Error(ErrorCode::kMalformedDocument, "field without name");
      }
      if (!node.children.empty()) {
        return Error(ErrorCode::kMalformedDocument, "field with children");
      }
      break;
    case NodeKind::kComplex:
      if (node.name.empty()) {
        return Error(ErrorCode::kMalformedDocument,
                     "complex node without element type");
      }
      break;
    case NodeKind::kSbom:
      if (!IsValidPurl(node.name)) {
        return Error(ErrorCode::kMissingIndex,
                     "SBOM node index is not a pURL: " + node.name);
      }
      break;
    case NodeKind::kPlaceholder:
      break;
  }
  if (is_root && node.kind != NodeKind::kSbom) {
    return Error(ErrorCode::kMalformedDocument, "root must be an SBOM node");
  }
  for (const Node& child : node.children) {
    PETRA_RETURN_IF_ERROR(ValidateNode(child, false));
  }
  return absl::OkStatus();
}

void Walk(const Node& node, size_t position, std::vector<const Node*>& ancestors,
          NodeId& next_id, const std::function<void(const NodeRef&)>& fn) {
  NodeRef ref{next_id++, &node, &ancestors, position};
  fn(ref);
  ancestors.push_back(&node);
  for (size_t i = 0; i < node.children.size(); ++i) {
    Walk(node.children[i], i, ancestors, next_id, fn);
  }
  ancestors.pop_back();
}

std::string_view KindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kField:
      return "field";
    case NodeKind::kComplex:
      return "complex";
    case NodeKind::kSbom:
      return "sbom";
    case NodeKind::kPlaceholder:
      return "redacted";
  }
  return "unknown";
}

nlohmann::ordered_json NodeJson(const Node& node) {
  nlohmann::ordered_json out;
  out["kind"] = KindName(node.kind);
  switch (node.kind) {
    case NodeKind::kField:
      out["name"] = node.name;
      out["value"] = node.value;
      break;
    case NodeKind::kComplex:
      out["type"] = node.name;
      break;
    case NodeKind::kSbom:
      out["index"] = node.name;
      out["meta"] = node.value;
      break;
    case NodeKind::kPlaceholder:
      out["policy"] = node.name;
      out["hash"] = node.value;
      break;
  }
  if (!node.children.empty()) {
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (const Node& child : node.children) children.push_back(NodeJson(child));
    out["children"] = std::move(children);
  }
  return out;
}

}  // namespace

std::string_view FormatName(SourceFormat format) {
  switch (format) {
    case SourceFormat::kSpdx:
      return "SPDX";
    case SourceFormat::kCycloneDx:
      return "CycloneDX";
    case SourceFormat::kNative:
      return "Native";
  }
  return "Native";
}

absl::StatusOr<SourceFormat> ParseFormatName(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "spdx") return SourceFormat::kSpdx;
  if (lower == "cyclonedx" || lower == "cdx") return SourceFormat::kCycloneDx;
  if (lower == "native") return SourceFormat::kNative;
  return Error(ErrorCode::kUnsupportedFormat,
               "unsupported format \"" + std::string(name) + "\"");
}

Node Node::Field(std::string name, std::string value) {
  return Node{NodeKind::kField, std::move(name), std::move(value), {}};
}

Node Node::Complex(std::string element_type, std::vector<Node> children) {
  return Node{NodeKind::kComplex, std::move(element_type), "",
              std::move(children)};
}

Node Node::Sbom(std::string index, std::string doc_meta,
                std::vector<Node> children) {
  return Node{NodeKind::kSbom, std::move(index), std::move(doc_meta),
              std::move(children)};
}

Node Node::Placeholder(std::string policy_hex, std::string hash_hex,
                       std::vector<Node> children) {
  return Node{NodeKind::kPlaceholder, std::move(policy_hex),
              std::move(hash_hex), std::move(children)};
}

std::string_view Node::Segment() const {
  switch (kind) {
    case NodeKind::kSbom:
      return "sbom";
    case NodeKind::kPlaceholder:
      return "?";
    default:
      return name;
  }
}

absl::Status ValidateTree(const SbomTree& tree) {
  return ValidateNode(tree.root, true);
}

void ForEachNode(const Node& root,
                 const std::function<void(const NodeRef&)>& fn) {
  std::vector<const Node*> ancestors;
  NodeId next = 0;
  Walk(root, 0, ancestors, next, fn);
}

size_t CountNodes(const Node& root) {
  size_t n = 1;
  for (const Node& child : root.children) n += CountNodes(child);
  return n;
}

std::string PathString(const NodeRef& ref) {
  std::string out;
  for (const Node* a : *ref.ancestors) {
    out += a->Segment();
    out += '.';
  }
  out += ref.node->Segment();
  return out;
}

std::vector<std::pair<std::string, std::string>> FieldPairs(const Node& root) {
  std::vector<std::pair<std::string, std::string>> out;
  ForEachNode(root, [&](const NodeRef& ref) {
    if (ref.node->is_field()) out.emplace_back(PathString(ref), ref.node->value);
  });
  return out;
}

Bytes SerializeTree(const SbomTree& tree) {
  ByteWriter out;
  out.Raw(AsBytes(kNativeMagic))
      .U8(kNativeVersion)
      .U8(static_cast<uint8_t>(tree.format));
  EncodeNode(tree.root, out);
  return std::move(out).Take();
}

absl::StatusOr<SbomTree> ParseNative(ByteView bytes) {
  ByteReader in(bytes);
  auto magic = in.Raw(kNativeMagic.size());
  if (!magic.ok() || ToString(*magic) != kNativeMagic) {
    return Error(ErrorCode::kMalformedDocument, "missing PTRE magic");
  }
  PETRA_ASSIGN_OR_RETURN(uint8_t version, in.U8());
  if (version != kNativeVersion) {
    return Error(ErrorCode::kUnsupportedFormat, "unknown native tree version");
  }
  PETRA_ASSIGN_OR_RETURN(uint8_t format, in.U8());
  if (format < 0x01 || format > 0x03) {
    return Error(ErrorCode::kMalformedDocument, "unknown source format");
  }
  SbomTree tree;
  tree.format = static_cast<SourceFormat>(format);
  PETRA_ASSIGN_OR_RETURN(tree.root, DecodeNode(in, 0));
  if (!in.empty()) {
    return Error(ErrorCode::kMalformedDocument, "trailing bytes after tree");
  }
  PETRA_RETURN_IF_ERROR(ValidateTree(tree));
  return tree;
}

std::string TreeToJson(const Node& root, int indent) {
  return NodeJson(root).dump(indent);
}

}  // namespace petra::sbom
