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

#include "petra/merkle/merkle.h"

#include <algorithm>

#include "petra/common/error.h"
#include "petra/policy/access_tree.h"

namespace petra::merkle {
namespace {

using sbom::Node;
using sbom::NodeId;
using sbom::NodeKind;

absl::Status Malformed(std::string_view what) {
  return Error(ErrorCode::kMalformedDocument, what);
}

Digest InnerHash(const Digest& commitment,
                 std::span<const Digest> child_plain_hashes) {
  Sha256Hasher hasher;
  ByteWriter w;
  w.Lp(commitment);
  hasher.Update(w.bytes());
  for (const Digest& child : child_plain_hashes) {
    ByteWriter c;
    c.Lp(child);
    hasher.Update(c.bytes());
  }
  return hasher.Finish();
}

absl::StatusOr<Digest> PlainPassNode(const Node& node, RandomSource* rng,
                                     NodeId& next, PlainPass& out) {
  if (node.is_placeholder()) {
    return Error(ErrorCode::kMalformedDocument,
                 "plaintext tree contains a placeholder");
  }
  const NodeId id = next++;
  Salt salt;
  if (rng != nullptr) {
    rng->Fill(salt);
    out.salts[id] = salt;
  } else {
    if (id >= out.salts.size()) {
      return Error(ErrorCode::kSaltMissing, "no salt for node");
    }
    salt = out.salts[id];
  }
  std::vector<Digest> child_hashes;
  child_hashes.reserve(node.children.size());
  for (const Node& child : node.children) {
    PETRA_ASSIGN_OR_RETURN(Digest h, PlainPassNode(child, rng, next, out));
    child_hashes.push_back(h);
  }
  const Digest h = PlainHash(node, salt, child_hashes);
  out.plain_hashes[id] = h;
  return h;
}

void WalkRedacted(const RedactedNode& node,
                  const std::vector<abe::PolicyKeySlot>* keyslots,
                  size_t depth, NodeId& next,
                  const std::function<void(const RedactedRef&)>& fn) {
  if (node.kind == NodeKind::kSbom) keyslots = &node.keyslots;
  fn({next++, &node, keyslots, depth});
  for (const RedactedNode& child : node.children) {
    WalkRedacted(child, keyslots, depth + 1, next, fn);
  }
}

absl::StatusOr<Digest> RedactedPassNode(
    const RedactedNode& node, const std::vector<abe::PolicyKeySlot>* keyslots,
    NodeId& next, std::vector<Digest>& out) {
  if (node.kind == NodeKind::kSbom) keyslots = &node.keyslots;
  const NodeId id = next++;
  if (!node.plain_hash.has_value()) {
    return Error(ErrorCode::kMissingPlainHash, "node has no plain hash");
  }
  static const std::vector<abe::PolicyKeySlot> kNoSlots;
  PETRA_ASSIGN_OR_RETURN(Bytes head,
                         NodeHead(node, keyslots ? *keyslots : kNoSlots));
  std::vector<Digest> child_hashes;
  child_hashes.reserve(node.children.size());
  for (const RedactedNode& child : node.children) {
    PETRA_ASSIGN_OR_RETURN(Digest h,
                           RedactedPassNode(child, keyslots, next, out));
    child_hashes.push_back(h);
  }
  const Digest h = NodeHash(head, *node.plain_hash, child_hashes);
  if (out.size() <= id) out.resize(id + 1);
  out[id] = h;
  return h;
}

absl::StatusOr<Bytes> MarkerHead(
    Marker marker, uint32_t slot, ByteView content,
    std::span<const abe::PolicyKeySlot> keyslots) {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(marker));
  if (marker == Marker::kRedacted) {
    if (slot >= keyslots.size()) {
      return Malformed("redacted node refers to a missing keyslot");
    }
    PETRA_ASSIGN_OR_RETURN(Bytes access, SlotAccessEncoding(keyslots[slot]));
    w.Lp(access);
  } else if (marker != Marker::kPublic) {
    return Malformed("unknown node marker");
  }
  w.Lp(content);
  return std::move(w).Take();
}

void PutDigests(ByteWriter& w, std::span<const Digest> digests) {
  w.U32(static_cast<uint32_t>(digests.size()));
  for (const Digest& d : digests) w.Raw(d);
}

absl::StatusOr<Digest> ReadDigest(ByteReader& r) {
  PETRA_ASSIGN_OR_RETURN(ByteView raw, r.Raw(kDigestSize));
  Digest d;
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

absl::StatusOr<std::vector<Digest>> ReadDigests(ByteReader& r) {
  PETRA_ASSIGN_OR_RETURN(uint32_t n, r.U32());
  if (n > r.remaining() / kDigestSize) return Malformed("digest count");
  std::vector<Digest> out;
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    PETRA_ASSIGN_OR_RETURN(Digest d, ReadDigest(r));
    out.push_back(d);
  }
  return out;
}

void MarkSubtree(const RedactedNode& node, NodeId first, NodeCheck check,
                 SamenessReport& report) {
  const size_t n = CountRedacted(node);
  for (size_t i = 0; i < n; ++i) report.nodes[first + i] = check;
}

// Returns the plain hash the parent should fold in: recomputed when the
// plaintext is available, embedded otherwise.
absl::StatusOr<Digest> SamenessNode(const RedactedNode& r, NodeId red_id,
                                    const Node& p, NodeId plain_id,
                                    const std::map<NodeId, Salt>& salts,
                                    SamenessReport& report) {
  if (!r.plain_hash.has_value()) {
    return Error(ErrorCode::kMissingPlainHash, "node has no plain hash");
  }
  if (p.is_placeholder() && p.name == kEmbeddedSbomName &&
      r.kind == NodeKind::kSbom) {
    MarkSubtree(r, red_id, NodeCheck::kAssumed, report);
    return *r.plain_hash;
  }
  if (p.children.size() != r.children.size() ||
      (!p.is_placeholder() && p.kind != r.kind)) {
    report.nodes[red_id] = NodeCheck::kMismatch;
    for (size_t i = 1; i < CountRedacted(r); ++i) {
      report.nodes[red_id + i] = NodeCheck::kUnverifiable;
    }
    return Digest{};  // never equals a real hash in practice
  }
  std::vector<Digest> child_hashes;
  child_hashes.reserve(r.children.size());
  NodeId next_red = red_id + 1;
  NodeId next_plain = plain_id + 1;
  for (size_t i = 0; i < r.children.size(); ++i) {
    PETRA_ASSIGN_OR_RETURN(Digest h,
                           SamenessNode(r.children[i], next_red, p.children[i],
                                        next_plain, salts, report));
    child_hashes.push_back(h);
    next_red += CountRedacted(r.children[i]);
    next_plain += sbom::CountNodes(p.children[i]);
  }
  if (p.is_placeholder()) {
    report.nodes[red_id] = NodeCheck::kUnverifiable;
    return *r.plain_hash;
  }
  auto salt = salts.find(plain_id);
  if (salt == salts.end()) {
    return Error(ErrorCode::kSaltMissing,
                 "no salt for plaintext node " + std::to_string(plain_id));
  }
  const Digest recomputed = PlainHash(p, salt->second, child_hashes);
  report.nodes[red_id] = recomputed == *r.plain_hash ? NodeCheck::kMatch
                                                     : NodeCheck::kMismatch;
  return recomputed;
}

}  // namespace

Digest Commit(ByteView salt, ByteView data) {
  ByteWriter w;
  w.Lp(salt).Lp(data);
  return Sha256(w.bytes());
}

bool VerifyCommitment(const Digest& digest, ByteView salt, ByteView data) {
  return Commit(salt, data) == digest;
}

Bytes NodePayload(const Node& node) {
  ByteWriter w;
  switch (node.kind) {
    case NodeKind::kField:
    case NodeKind::kSbom:
    case NodeKind::kPlaceholder:
      w.Lp(node.name).Lp(node.value);
      break;
    case NodeKind::kComplex:
      w.Lp(node.name);
      break;
  }
  return std::move(w).Take();
}

absl::StatusOr<Node> NodeFromPayload(NodeKind kind, ByteView payload) {
  ByteReader r(payload);
  PETRA_ASSIGN_OR_RETURN(std::string name, r.LpString());
  Node node;
  switch (kind) {
    case NodeKind::kField: {
      PETRA_ASSIGN_OR_RETURN(std::string value, r.LpString());
      node = Node::Field(std::move(name), std::move(value));
      break;
    }
    case NodeKind::kSbom: {
      PETRA_ASSIGN_OR_RETURN(std::string meta, r.LpString());
      node = Node::Sbom(std::move(name), std::move(meta));
      break;
    }
    case NodeKind::kComplex:
      node = Node::Complex(std::move(name));
      break;
    default:
      return Malformed("payload of unsupported node kind");
  }
  if (!r.empty()) return Malformed("trailing bytes in node payload");
  return node;
}

Digest PlainHashFromPayload(NodeKind kind, ByteView salt, ByteView payload,
                            std::span<const Digest> child_plain_hashes) {
  const Digest commitment = Commit(salt, payload);
  if (kind == NodeKind::kField) return commitment;
  return InnerHash(commitment, child_plain_hashes);
}

Digest PlainHash(const Node& node, ByteView salt,
                 std::span<const Digest> child_plain_hashes) {
  return PlainHashFromPayload(node.kind, salt, NodePayload(node),
                              child_plain_hashes);
}

absl::StatusOr<PlainPass> ComputePlainPass(const Node& root,
                                           RandomSource& rng) {
  const size_t n = sbom::CountNodes(root);
  PlainPass out;
  out.plain_hashes.resize(n);
  out.salts.resize(n);
  NodeId next = 0;
  PETRA_RETURN_IF_ERROR(PlainPassNode(root, &rng, next, out).status());
  return out;
}

absl::StatusOr<std::vector<Digest>> RecomputePlainHashes(
    const Node& root, const std::vector<Salt>& salts) {
  PlainPass pass;
  pass.plain_hashes.resize(sbom::CountNodes(root));
  pass.salts = salts;
  NodeId next = 0;
  PETRA_RETURN_IF_ERROR(PlainPassNode(root, nullptr, next, pass).status());
  return std::move(pass.plain_hashes);
}

void ForEachRedacted(const RedactedNode& root,
                     const std::function<void(const RedactedRef&)>& fn) {
  NodeId next = 0;
  WalkRedacted(root, nullptr, 0, next, fn);
}

size_t CountRedacted(const RedactedNode& root) {
  size_t n = 1;
  for (const RedactedNode& child : root.children) n += CountRedacted(child);
  return n;
}

Bytes EncodeKeyslotTable(std::span<const abe::PolicyKeySlot> keyslots) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(keyslots.size()));
  for (const abe::PolicyKeySlot& slot : keyslots) {
    w.Raw(slot.policy_id).Lp(slot.encapsulated_key);
  }
  return std::move(w).Take();
}

absl::StatusOr<std::vector<abe::PolicyKeySlot>> DecodeKeyslotTable(
    ByteReader& reader) {
  PETRA_ASSIGN_OR_RETURN(uint32_t n, reader.U32());
  if (n > reader.remaining() / (kDigestSize + 4)) {
    return Malformed("keyslot count exceeds input");
  }
  std::vector<abe::PolicyKeySlot> out(n);
  for (abe::PolicyKeySlot& slot : out) {
    PETRA_ASSIGN_OR_RETURN(slot.policy_id, ReadDigest(reader));
    PETRA_ASSIGN_OR_RETURN(ByteView key, reader.Lp());
    slot.encapsulated_key.assign(key.begin(), key.end());
  }
  return out;
}

absl::StatusOr<Bytes> SlotAccessEncoding(const abe::PolicyKeySlot& slot) {
  PETRA_ASSIGN_OR_RETURN(policy::AccessTree tree, abe::SlotAccessTree(slot));
  return policy::EncodeAccessTree(tree);
}

absl::StatusOr<Bytes> NodeHead(
    const RedactedNode& node,
    std::span<const abe::PolicyKeySlot> enclosing_keyslots) {
  if (node.kind != NodeKind::kSbom) {
    return MarkerHead(node.marker, node.slot, node.content,
                      enclosing_keyslots);
  }
  PETRA_ASSIGN_OR_RETURN(
      Bytes meta, MarkerHead(node.marker, node.slot, node.content,
                             node.keyslots));
  ByteWriter segment;
  segment.Lp(EncodeKeyslotTable(node.keyslots)).Lp(meta);
  ByteWriter head;
  head.Lp(segment.bytes());
  return std::move(head).Take();
}

Digest NodeHash(ByteView head, const Digest& plain_hash,
                std::span<const Digest> child_hashes) {
  Sha256Hasher hasher;
  hasher.Update(head);
  ByteWriter w;
  w.Lp(plain_hash);
  for (const Digest& child : child_hashes) w.Lp(child);
  hasher.Update(w.bytes());
  return hasher.Finish();
}

absl::StatusOr<std::vector<Digest>> RedactedPass(const RedactedNode& root) {
  std::vector<Digest> out(CountRedacted(root));
  NodeId next = 0;
  PETRA_RETURN_IF_ERROR(RedactedPassNode(root, nullptr, next, out).status());
  return out;
}

absl::StatusOr<Digest> MerkleRoot(const RedactedNode& root) {
  PETRA_ASSIGN_OR_RETURN(std::vector<Digest> hashes, RedactedPass(root));
  return hashes[0];
}

Digest MembershipProof::TargetHash() const {
  return NodeHash(target_head, target_plain_hash, target_children);
}

Bytes MembershipProof::Encode() const {
  ByteWriter w;
  w.Lp(target_head).Raw(target_plain_hash);
  PutDigests(w, target_children);
  w.U32(static_cast<uint32_t>(path.size()));
  for (const ProofStep& step : path) {
    w.Lp(step.head).Raw(step.plain_hash).U32(step.position);
    PutDigests(w, step.siblings);
  }
  w.Raw(root);
  return std::move(w).Take();
}

absl::StatusOr<MembershipProof> MembershipProof::Decode(ByteView bytes) {
  ByteReader r(bytes);
  MembershipProof proof;
  PETRA_ASSIGN_OR_RETURN(ByteView head, r.Lp());
  proof.target_head.assign(head.begin(), head.end());
  PETRA_ASSIGN_OR_RETURN(proof.target_plain_hash, ReadDigest(r));
  PETRA_ASSIGN_OR_RETURN(proof.target_children, ReadDigests(r));
  PETRA_ASSIGN_OR_RETURN(uint32_t steps, r.U32());
  if (steps > r.remaining() / (4 + kDigestSize + 8)) {
    return Malformed("proof step count exceeds input");
  }
  for (uint32_t i = 0; i < steps; ++i) {
    ProofStep step;
    PETRA_ASSIGN_OR_RETURN(ByteView step_head, r.Lp());
    step.head.assign(step_head.begin(), step_head.end());
    PETRA_ASSIGN_OR_RETURN(step.plain_hash, ReadDigest(r));
    PETRA_ASSIGN_OR_RETURN(step.position, r.U32());
    PETRA_ASSIGN_OR_RETURN(step.siblings, ReadDigests(r));
    if (step.position > step.siblings.size()) {
      return Malformed("proof position out of range");
    }
    proof.path.push_back(std::move(step));
  }
  PETRA_ASSIGN_OR_RETURN(proof.root, ReadDigest(r));
  if (!r.empty()) return Malformed("trailing bytes after membership proof");
  return proof;
}

absl::StatusOr<MembershipProof> ProveMembership(const RedactedNode& root,
                                                NodeId id) {
  PETRA_ASSIGN_OR_RETURN(std::vector<Digest> hashes, RedactedPass(root));
  if (id >= hashes.size()) {
    return Error(ErrorCode::kNodeNotFound,
                 "node " + std::to_string(id) + " is not in the tree");
  }
  // Descend from the root, recording each ancestor and the child taken.
  struct Frame {
    const RedactedNode* node;
    const std::vector<abe::PolicyKeySlot>* keyslots;
    NodeId id;
    uint32_t position;
  };
  std::vector<Frame> chain;
  const RedactedNode* node = &root;
  const std::vector<abe::PolicyKeySlot>* keyslots = &root.keyslots;
  NodeId node_id = 0;
  while (node_id != id) {
    NodeId child_id = node_id + 1;
    uint32_t position = 0;
    for (; position < node->children.size(); ++position) {
      const size_t size = CountRedacted(node->children[position]);
      if (id < child_id + size) break;
      child_id += size;
    }
    chain.push_back({node, keyslots, node_id, position});
    node = &node->children[position];
    if (node->kind == NodeKind::kSbom) keyslots = &node->keyslots;
    node_id = child_id;
  }
  auto child_hashes = [&](const RedactedNode& n, NodeId nid) {
    std::vector<Digest> out;
    NodeId cid = nid + 1;
    for (const RedactedNode& c : n.children) {
      out.push_back(hashes[cid]);
      cid += CountRedacted(c);
    }
    return out;
  };
  MembershipProof proof;
  PETRA_ASSIGN_OR_RETURN(proof.target_head, NodeHead(*node, *keyslots));
  proof.target_plain_hash = *node->plain_hash;
  proof.target_children = child_hashes(*node, id);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    ProofStep step;
    PETRA_ASSIGN_OR_RETURN(step.head, NodeHead(*it->node, *it->keyslots));
    step.plain_hash = *it->node->plain_hash;
    step.position = it->position;
    step.siblings = child_hashes(*it->node, it->id);
    step.siblings.erase(step.siblings.begin() + it->position);
    proof.path.push_back(std::move(step));
  }
  proof.root = hashes[0];
  return proof;
}

absl::StatusOr<NodeId> ResolveUniqueNode(const Node& view,
                                         const policy::PathSelector& selector) {
  const std::vector<NodeId> ids = policy::SelectNodes(selector, view);
  if (ids.empty()) {
    return Error(ErrorCode::kNodeNotFound,
                 "no node matches \"" + selector.text() + "\"");
  }
  if (ids.size() > 1) {
    return Error(ErrorCode::kAmbiguousPath,
                 std::to_string(ids.size()) + " nodes match \"" +
                     selector.text() + "\"");
  }
  return ids[0];
}

bool VerifyMembership(const MembershipProof& proof, const Digest& root) {
  Digest h = proof.TargetHash();
  for (const ProofStep& step : proof.path) {
    if (step.position > step.siblings.size()) return false;
    std::vector<Digest> children = step.siblings;
    children.insert(children.begin() + step.position, h);
    h = NodeHash(step.head, step.plain_hash, children);
  }
  return h == proof.root && proof.root == root;
}

size_t SamenessReport::Count(NodeCheck check) const {
  return static_cast<size_t>(std::count(nodes.begin(), nodes.end(), check));
}

bool SamenessReport::AllMatch() const {
  return Count(NodeCheck::kMismatch) == 0 &&
         Count(NodeCheck::kUnverifiable) == 0;
}

absl::StatusOr<SamenessReport> VerifySameness(
    const RedactedNode& redacted, const Node& plaintext,
    const std::map<NodeId, Salt>& salts) {
  SamenessReport report;
  report.nodes.assign(CountRedacted(redacted), NodeCheck::kUnverifiable);
  PETRA_RETURN_IF_ERROR(
      SamenessNode(redacted, 0, plaintext, 0, salts, report).status());
  return report;
}

std::map<NodeId, Salt> SaltMap(const std::vector<Salt>& salts) {
  std::map<NodeId, Salt> out;
  for (NodeId i = 0; i < salts.size(); ++i) out[i] = salts[i];
  return out;
}

}  // namespace petra::merkle
