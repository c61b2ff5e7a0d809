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

#include "petra/merkle/container.h"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "petra/common/error.h"

namespace petra::merkle {
namespace {

using Json = nlohmann::ordered_json;
using sbom::NodeKind;

constexpr char kContainerFormat[] = "petra-redacted-sbom";
constexpr char kSaltFormat[] = "petra-plain-bundle";
constexpr char kSignatureAlgorithm[] = "ed25519";
constexpr uint32_t kMaxDepth = 256;

absl::Status Malformed(std::string_view what) {
  return Error(ErrorCode::kMalformedDocument, what);
}

void EncodeNode(const RedactedNode& node, bool omit_keyslots, ByteWriter& w) {
  w.U8(static_cast<uint8_t>(node.kind)).U8(static_cast<uint8_t>(node.marker));
  if (node.marker == Marker::kRedacted) w.U32(node.slot);
  w.Lp(node.content);
  w.Raw(node.plain_hash.value_or(Digest{}));
  if (node.kind == NodeKind::kSbom) {
    if (!omit_keyslots) w.Raw(EncodeKeyslotTable(node.keyslots));
    w.U8(node.embedded.has_value() ? 1 : 0);
    if (node.embedded.has_value()) {
      w.Lp(node.embedded->generator_signature)
          .Lp(node.embedded->producer_signature)
          .Lp(node.embedded->link_proof);
    }
  }
  w.U32(static_cast<uint32_t>(node.children.size()));
  for (const RedactedNode& child : node.children) EncodeNode(child, false, w);
}

Bytes ToVec(ByteView v) { return Bytes(v.begin(), v.end()); }

absl::StatusOr<RedactedNode> DecodeNode(ByteReader& r, bool omit_keyslots,
                                        uint32_t depth) {
  if (depth > kMaxDepth) return Malformed("redacted tree too deep");
  RedactedNode node;
  PETRA_ASSIGN_OR_RETURN(uint8_t kind, r.U8());
  if (kind != static_cast<uint8_t>(NodeKind::kField) &&
      kind != static_cast<uint8_t>(NodeKind::kComplex) &&
      kind != static_cast<uint8_t>(NodeKind::kSbom)) {
    return Malformed("unknown redacted node kind");
  }
  node.kind = static_cast<NodeKind>(kind);
  PETRA_ASSIGN_OR_RETURN(uint8_t marker, r.U8());
  if (marker != static_cast<uint8_t>(Marker::kRedacted) &&
      marker != static_cast<uint8_t>(Marker::kPublic)) {
    return Malformed("unknown node marker");
  }
  node.marker = static_cast<Marker>(marker);
  if (node.marker == Marker::kRedacted) {
    PETRA_ASSIGN_OR_RETURN(node.slot, r.U32());
  }
  PETRA_ASSIGN_OR_RETURN(ByteView content, r.Lp());
  node.content = ToVec(content);
  PETRA_ASSIGN_OR_RETURN(ByteView plain, r.Raw(kDigestSize));
  Digest plain_hash;
  std::copy(plain.begin(), plain.end(), plain_hash.begin());
  node.plain_hash = plain_hash;
  if (node.kind == NodeKind::kSbom) {
    if (!omit_keyslots) {
      PETRA_ASSIGN_OR_RETURN(node.keyslots, DecodeKeyslotTable(r));
    }
    PETRA_ASSIGN_OR_RETURN(uint8_t embedded, r.U8());
    if (embedded > 1) return Malformed("bad embedded flag");
    if (embedded == 1) {
      EmbeddedInfo info;
      PETRA_ASSIGN_OR_RETURN(ByteView gen, r.Lp());
      PETRA_ASSIGN_OR_RETURN(ByteView prod, r.Lp());
      PETRA_ASSIGN_OR_RETURN(ByteView proof, r.Lp());
      info.generator_signature = ToVec(gen);
      info.producer_signature = ToVec(prod);
      info.link_proof = ToVec(proof);
      node.embedded = std::move(info);
    }
  }
  PETRA_ASSIGN_OR_RETURN(uint32_t count, r.U32());
  // Every child takes at least 2 + 4 + 32 + 4 bytes.
  if (count > r.remaining() / 42) return Malformed("child count exceeds input");
  node.children.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    PETRA_ASSIGN_OR_RETURN(RedactedNode child, DecodeNode(r, false, depth + 1));
    node.children.push_back(std::move(child));
  }
  return node;
}

absl::StatusOr<Bytes> DecodeB64Field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    return Malformed(std::string("missing \"") + key + "\"");
  }
  return Base64Decode(doc[key].get<std::string>());
}

absl::StatusOr<Digest> DecodeDigestHex(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    return Malformed(std::string("missing \"") + key + "\"");
  }
  PETRA_ASSIGN_OR_RETURN(Bytes raw, HexDecode(doc[key].get<std::string>()));
  if (raw.size() != kDigestSize) {
    return Malformed(std::string("\"") + key + "\" is not a 32-byte digest");
  }
  Digest d;
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

absl::StatusOr<Json> ParseEnvelope(std::string_view text,
                                   std::string_view format) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Malformed("container is not a JSON object");
  }
  if (doc.value("format", std::string()) != format) {
    return Malformed("unexpected container format");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    return Malformed("missing container version");
  }
  if (doc["version"].get<int>() != kContainerVersion) {
    return Error(ErrorCode::kUnsupportedFormat, "unknown container version");
  }
  return doc;
}

}  // namespace

Bytes EncodeRedactedTree(const RedactedNode& root, bool omit_root_keyslots) {
  ByteWriter w;
  EncodeNode(root, omit_root_keyslots, w);
  return std::move(w).Take();
}

absl::StatusOr<RedactedNode> DecodeRedactedTree(ByteView bytes,
                                                bool omit_root_keyslots) {
  ByteReader r(bytes);
  PETRA_ASSIGN_OR_RETURN(RedactedNode root,
                         DecodeNode(r, omit_root_keyslots, 0));
  if (!r.empty()) return Malformed("trailing bytes after redacted tree");
  if (root.kind != NodeKind::kSbom) {
    return Malformed("redacted tree root is not an SBOM node");
  }
  return root;
}

std::optional<PublicIndex> PublicRootIndex(const RedactedNode& root) {
  if (root.kind != NodeKind::kSbom || root.marker != Marker::kPublic) {
    return std::nullopt;
  }
  ByteReader r(root.content);
  auto salt = r.Lp();
  auto payload = salt.ok() ? r.Lp() : salt;
  if (!payload.ok()) return std::nullopt;
  auto node = NodeFromPayload(NodeKind::kSbom, *payload);
  if (!node.ok()) return std::nullopt;
  return PublicIndex{node->name, node->value};
}

std::string WriteContainer(const RedactedSbom& sbom) {
  Json doc;
  doc["format"] = kContainerFormat;
  doc["version"] = kContainerVersion;
  doc["merkle_root"] = HexEncode(sbom.merkle_root);
  if (auto index = PublicRootIndex(sbom.root)) {
    doc["index"] = index->index;
    doc["source_format"] = index->format;
  }
  doc["signature_algorithm"] = kSignatureAlgorithm;
  doc["signatures"] = {
      {"generator", Base64Encode(sbom.generator_signature)},
      {"producer", Base64Encode(sbom.producer_signature)}};
  Json slots = Json::array();
  for (const abe::PolicyKeySlot& slot : sbom.root.keyslots) {
    ByteWriter w;
    w.Raw(slot.policy_id).Raw(slot.encapsulated_key);
    slots.push_back(Base64Encode(w.bytes()));
  }
  doc["keyslots"] = std::move(slots);
  doc["tree"] = Base64Encode(EncodeRedactedTree(sbom.root, true));
  return doc.dump(2) + "\n";
}

absl::StatusOr<RedactedSbom> ReadContainer(std::string_view text) {
  PETRA_ASSIGN_OR_RETURN(Json doc, ParseEnvelope(text, kContainerFormat));
  if (doc.value("signature_algorithm", std::string()) != kSignatureAlgorithm) {
    return Error(ErrorCode::kUnsupportedFormat, "unknown signature algorithm");
  }
  RedactedSbom out;
  PETRA_ASSIGN_OR_RETURN(out.merkle_root, DecodeDigestHex(doc, "merkle_root"));
  if (!doc.contains("signatures") || !doc["signatures"].is_object()) {
    return Malformed("missing \"signatures\"");
  }
  PETRA_ASSIGN_OR_RETURN(out.generator_signature,
                         DecodeB64Field(doc["signatures"], "generator"));
  PETRA_ASSIGN_OR_RETURN(out.producer_signature,
                         DecodeB64Field(doc["signatures"], "producer"));
  PETRA_ASSIGN_OR_RETURN(Bytes tree, DecodeB64Field(doc, "tree"));
  PETRA_ASSIGN_OR_RETURN(out.root, DecodeRedactedTree(tree, true));
  if (!doc.contains("keyslots") || !doc["keyslots"].is_array()) {
    return Malformed("missing \"keyslots\"");
  }
  for (const Json& entry : doc["keyslots"]) {
    if (!entry.is_string()) return Malformed("keyslot is not a string");
    PETRA_ASSIGN_OR_RETURN(Bytes raw, Base64Decode(entry.get<std::string>()));
    if (raw.size() <= kDigestSize) return Malformed("keyslot too short");
    abe::PolicyKeySlot slot;
    std::copy(raw.begin(), raw.begin() + kDigestSize, slot.policy_id.begin());
    slot.encapsulated_key.assign(raw.begin() + kDigestSize, raw.end());
    out.root.keyslots.push_back(std::move(slot));
  }
  return out;
}

std::string WriteSaltFile(const PlainSbomBundle& bundle) {
  Json doc;
  doc["format"] = kSaltFormat;
  doc["version"] = kContainerVersion;
  doc["merkle_root"] = HexEncode(bundle.merkle_root);
  doc["plain_root"] = HexEncode(bundle.plain_root);
  doc["plain_signature"] = Base64Encode(bundle.plain_signature);
  doc["tree"] = Base64Encode(sbom::SerializeTree(bundle.tree));
  Json salts = Json::array();
  sbom::ForEachNode(bundle.tree.root, [&](const sbom::NodeRef& ref) {
    auto it = bundle.salts.find(ref.id);
    if (it == bundle.salts.end()) return;
    salts.push_back({{"id", ref.id},
                     {"path", sbom::PathString(ref)},
                     {"salt", HexEncode(it->second)}});
  });
  doc["salts"] = std::move(salts);
  return doc.dump(2) + "\n";
}

absl::StatusOr<PlainSbomBundle> ReadSaltFile(std::string_view text) {
  PETRA_ASSIGN_OR_RETURN(Json doc, ParseEnvelope(text, kSaltFormat));
  PlainSbomBundle out;
  PETRA_ASSIGN_OR_RETURN(out.merkle_root, DecodeDigestHex(doc, "merkle_root"));
  PETRA_ASSIGN_OR_RETURN(out.plain_root, DecodeDigestHex(doc, "plain_root"));
  PETRA_ASSIGN_OR_RETURN(out.plain_signature,
                         DecodeB64Field(doc, "plain_signature"));
  PETRA_ASSIGN_OR_RETURN(Bytes tree, DecodeB64Field(doc, "tree"));
  PETRA_ASSIGN_OR_RETURN(out.tree, sbom::ParseNative(tree));
  if (!doc.contains("salts") || !doc["salts"].is_array()) {
    return Malformed("missing \"salts\"");
  }
  const size_t n = sbom::CountNodes(out.tree.root);
  for (const Json& entry : doc["salts"]) {
    if (!entry.is_object() || !entry.contains("id") ||
        !entry["id"].is_number_unsigned()) {
      return Malformed("salt entry needs an \"id\"");
    }
    const size_t id = entry["id"].get<size_t>();
    if (id >= n) return Malformed("salt entry id out of range");
    if (!entry.contains("salt") || !entry["salt"].is_string()) {
      return Malformed("salt entry needs a \"salt\"");
    }
    PETRA_ASSIGN_OR_RETURN(Bytes raw, HexDecode(entry["salt"].get<std::string>()));
    if (raw.size() != abe::kSaltSize) return Malformed("salt is not 32 bytes");
    Salt s;
    std::copy(raw.begin(), raw.end(), s.begin());
    out.salts[id] = s;
  }
  return out;
}

}  // namespace petra::merkle
