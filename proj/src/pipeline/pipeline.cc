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

#include "petra/pipeline/pipeline.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <string>

#include "petra/common/error.h"

namespace petra::pipeline {
namespace {

using merkle::Marker;
using merkle::RedactedNode;
using merkle::RedactedSbom;
using merkle::Salt;
using sbom::Node;
using sbom::NodeId;
using sbom::NodeKind;

class Stopwatch {
 public:
  double ElapsedMs() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

// Adds the lifetime of the scope to `*sink` when `sink` is set.
class ScopedTimer {
 public:
  explicit ScopedTimer(double* sink) : sink_(sink) {}
  ~ScopedTimer() {
    if (sink_ != nullptr) *sink_ += watch_.ElapsedMs();
  }

 private:
  double* sink_;
  Stopwatch watch_;
};

double* Sink(PhaseTimings* timings, double PhaseTimings::*field) {
  return timings != nullptr ? &(timings->*field) : nullptr;
}

absl::Status Untrusted(std::string_view what) {
  return Error(ErrorCode::kUntrustedSbom, what);
}

absl::Status Lied(std::string_view what) {
  return Error(ErrorCode::kGeneratorProducerLied, what);
}

Bytes PublicContent(ByteView salt, ByteView payload) {
  ByteWriter w;
  w.Lp(salt).Lp(payload);
  return std::move(w).Take();
}

absl::StatusOr<abe::NodePlaintext> ParsePublicContent(ByteView content) {
  ByteReader r(content);
  PETRA_ASSIGN_OR_RETURN(ByteView salt, r.Lp());
  PETRA_ASSIGN_OR_RETURN(ByteView payload, r.Lp());
  if (!r.empty() || salt.size() != abe::kSaltSize) {
    return Error(ErrorCode::kMalformedDocument, "bad public node content");
  }
  return abe::NodePlaintext{Bytes(salt.begin(), salt.end()),
                            Bytes(payload.begin(), payload.end())};
}

std::vector<Digest> ChildPlainHashes(const RedactedNode& node) {
  std::vector<Digest> out;
  out.reserve(node.children.size());
  for (const RedactedNode& child : node.children) {
    out.push_back(child.plain_hash.value_or(Digest{}));
  }
  return out;
}

// Calls fn(id, node) for every SBOM node directly nested in `root` (not
// inside another nested SBOM); ids are relative to `root`.
void ForEachDirectNested(RedactedNode& root,
                         const std::function<void(NodeId, RedactedNode&)>& fn) {
  std::function<void(RedactedNode&, NodeId)> walk = [&](RedactedNode& node,
                                                        NodeId id) {
    NodeId child_id = id + 1;
    for (RedactedNode& child : node.children) {
      if (child.kind == NodeKind::kSbom) {
        fn(child_id, child);
      } else {
        walk(child, child_id);
      }
      child_id += merkle::CountRedacted(child);
    }
  };
  walk(root, 0);
}

class Builder {
 public:
  Builder(const policy::RedactionPolicy& policy, const abe::PublicParams& pp,
          ByteView sk_gen, const RedactOptions& options,
          const std::map<std::string, const RedactedSbom*>& embedded,
          std::map<NodeId, Salt>& salts)
      : policy_(policy),
        pp_(pp),
        sk_gen_(sk_gen),
        rng_(options.rng != nullptr ? *options.rng : DefaultRandom()),
        now_(options.now),
        timings_(options.timings),
        embedded_(embedded),
        salts_(salts) {}

  // Redacts the SBOM rooted at `sbom_node`, whose plaintext preorder id in
  // the full tree is `plain_base`.
  absl::StatusOr<RedactedNode> BuildSbom(const Node& sbom_node,
                                         NodeId plain_base) {
    SbomContext ctx;
    ctx.plain_base = plain_base;
    {
      ScopedTimer timer(Sink(timings_, &PhaseTimings::tree_ms));
      ctx.assignments = policy::ResolvePolicy(policy_, sbom_node, now_);
    }
    {
      ScopedTimer timer(Sink(timings_, &PhaseTimings::encrypt_ms));
      PETRA_RETURN_IF_ERROR(AllocateSlots(sbom_node, ctx));
    }
    PETRA_ASSIGN_OR_RETURN(RedactedNode root, BuildNode(sbom_node, 0, ctx));
    root.keyslots = std::move(ctx.keyslots);
    // Link proofs are not hashed, so they can be filled in afterwards.
    absl::Status status;
    ForEachDirectNested(root, [&](NodeId id, RedactedNode& nested) {
      if (!status.ok()) return;
      auto proof = merkle::ProveMembership(root, id);
      if (!proof.ok()) {
        status = proof.status();
        return;
      }
      nested.embedded->link_proof = proof->Encode();
    });
    PETRA_RETURN_IF_ERROR(status);
    return root;
  }

 private:
  struct SbomContext {
    NodeId plain_base = 0;
    std::vector<policy::Assignment> assignments;
    std::vector<abe::PolicyKeySlot> keyslots;
    std::vector<abe::SymmetricKey> keys;
    std::map<Digest, uint32_t> slot_of;
  };

  // Visits nodes owned by this SBOM (not inside nested SBOMs), with ids
  // relative to it.
  static void ForEachOwned(const Node& node, NodeId id,
                           const std::function<void(const Node&, NodeId)>& fn) {
    fn(node, id);
    NodeId child_id = id + 1;
    for (const Node& child : node.children) {
      if (!child.is_sbom() && !child.is_placeholder()) {
        ForEachOwned(child, child_id, fn);
      }
      child_id += sbom::CountNodes(child);
    }
  }

  absl::Status AllocateSlots(const Node& sbom_node, SbomContext& ctx) {
    absl::Status status;
    ForEachOwned(sbom_node, 0, [&](const Node&, NodeId id) {
      if (!status.ok() || !ctx.assignments[id].has_value()) return;
      const Digest policy_id = policy::PolicyId(*ctx.assignments[id]);
      if (ctx.slot_of.contains(policy_id)) return;
      auto encapsulated =
          abe::Encapsulate(pp_, *ctx.assignments[id], rng_);
      if (!encapsulated.ok()) {
        status = encapsulated.status();
        return;
      }
      ctx.slot_of[policy_id] = static_cast<uint32_t>(ctx.keyslots.size());
      ctx.keys.push_back(encapsulated->first);
      ctx.keyslots.push_back(std::move(encapsulated->second));
    });
    return status;
  }

  absl::StatusOr<RedactedNode> BuildNode(const Node& node, NodeId rel_id,
                                         SbomContext& ctx) {
    if (rel_id > 0 && node.is_sbom()) return BuildNested(node, ctx, rel_id);
    if (node.is_placeholder()) {
      if (node.name != merkle::kEmbeddedSbomName) {
        return Error(ErrorCode::kMalformedDocument,
                     "plaintext tree contains a placeholder");
      }
      return EmbedRedacted(node.value);
    }
    RedactedNode out;
    out.kind = node.kind;
    NodeId child_id = rel_id + 1;
    for (const Node& child : node.children) {
      PETRA_ASSIGN_OR_RETURN(RedactedNode built,
                             BuildNode(child, child_id, ctx));
      out.children.push_back(std::move(built));
      child_id += sbom::CountNodes(child);
    }
    Salt salt;
    rng_.Fill(salt);
    salts_[ctx.plain_base + rel_id] = salt;
    const Bytes payload = merkle::NodePayload(node);
    out.plain_hash = merkle::PlainHashFromPayload(node.kind, salt, payload,
                                                  ChildPlainHashes(out));
    const policy::Assignment& access = ctx.assignments[rel_id];
    ScopedTimer timer(Sink(timings_, &PhaseTimings::encrypt_ms));
    if (access.has_value()) {
      const uint32_t slot = ctx.slot_of.at(policy::PolicyId(*access));
      out.marker = Marker::kRedacted;
      out.slot = slot;
      out.content = abe::EncryptNode(ctx.keys[slot],
                                     ctx.keyslots[slot].policy_id, salt,
                                     payload, rng_)
                        .Encode();
    } else {
      out.marker = Marker::kPublic;
      out.content = PublicContent(salt, payload);
    }
    return out;
  }

  absl::StatusOr<RedactedNode> BuildNested(const Node& node, SbomContext& ctx,
                                           NodeId rel_id) {
    PETRA_ASSIGN_OR_RETURN(RedactedNode nested,
                           BuildSbom(node, ctx.plain_base + rel_id));
    PETRA_ASSIGN_OR_RETURN(Digest root, merkle::MerkleRoot(nested));
    nested.embedded = merkle::EmbeddedInfo{Sign(sk_gen_, root), {}, {}};
    return nested;
  }

  absl::StatusOr<RedactedNode> EmbedRedacted(const std::string& root_hex) {
    auto it = embedded_.find(root_hex);
    if (it == embedded_.end()) {
      return Error(ErrorCode::kNotFound,
                   "no redacted SBOM with root " + root_hex + " to embed");
    }
    RedactedNode nested = it->second->root;
    nested.embedded = merkle::EmbeddedInfo{it->second->generator_signature,
                                           it->second->producer_signature, {}};
    return nested;
  }

  const policy::RedactionPolicy& policy_;
  const abe::PublicParams& pp_;
  ByteView sk_gen_;
  RandomSource& rng_;
  policy::YearMonth now_;
  PhaseTimings* timings_;
  const std::map<std::string, const RedactedSbom*>& embedded_;
  std::map<NodeId, Salt>& salts_;
};

absl::StatusOr<RedactionResult> RedactComposed(
    sbom::SbomTree plain, const policy::RedactionPolicy& policy,
    const abe::PublicParams& pp, ByteView sk_gen,
    const RedactOptions& options,
    const std::map<std::string, const RedactedSbom*>& embedded) {
  if (!plain.root.is_sbom()) {
    return Error(ErrorCode::kMalformedDocument, "root must be an SBOM node");
  }
  PhaseTimings* timings = options.timings;
  const PhaseTimings before = timings != nullptr ? *timings : PhaseTimings{};
  const Stopwatch total;
  RedactionResult result;
  Builder builder(policy, pp, sk_gen, options, embedded, result.plain.salts);
  PETRA_ASSIGN_OR_RETURN(result.redacted.root, builder.BuildSbom(plain.root, 0));
  PETRA_ASSIGN_OR_RETURN(result.redacted.merkle_root,
                         merkle::MerkleRoot(result.redacted.root));
  result.redacted.generator_signature =
      Sign(sk_gen, result.redacted.merkle_root);
  result.plain.tree = std::move(plain);
  result.plain.plain_root = *result.redacted.root.plain_hash;
  result.plain.plain_signature = Sign(sk_gen, result.plain.plain_root);
  result.plain.merkle_root = result.redacted.merkle_root;
  if (timings != nullptr) {
    timings->merkle_ms += total.ElapsedMs() -
                          (timings->tree_ms - before.tree_ms) -
                          (timings->encrypt_ms - before.encrypt_ms);
  }
  return result;
}

absl::Status VerifySignatures(const RedactedSbom& sbom, ByteView pk_gen,
                              ByteView pk_prod, bool require_countersig) {
  if (require_countersig || !sbom.producer_signature.empty()) {
    if (!VerifySignature(pk_prod, sbom.generator_signature,
                         sbom.producer_signature)) {
      return Untrusted("producer countersignature does not verify");
    }
  }
  auto root = merkle::MerkleRoot(sbom.root);
  if (!root.ok()) return Untrusted(std::string(root.status().message()));
  if (*root != sbom.merkle_root) {
    return Untrusted("tree does not hash to the signed merkle root");
  }
  if (!VerifySignature(pk_gen, sbom.merkle_root, sbom.generator_signature)) {
    return Untrusted("generator signature does not verify");
  }
  return absl::OkStatus();
}

class Decryptor {
 public:
  Decryptor(const abe::PublicParams& pp, const abe::AttributeSecretKey& sk,
            const ConsumeOptions& options, const std::vector<Digest>& hashes,
            DecryptedView& view)
      : pp_(pp),
        sk_(sk),
        options_(options),
        hashes_(hashes),
        view_(view),
        decrypt_sink_(Sink(options.timings, &PhaseTimings::decrypt_ms)) {}

  // Unpacks every satisfiable keyslot of every SBOM node before any node is
  // decrypted.
  void UnlockAll(const RedactedNode& root) {
    ScopedTimer timer(decrypt_sink_);
    merkle::ForEachRedacted(root, [&](const merkle::RedactedRef& ref) {
      if (ref.node->kind != NodeKind::kSbom) return;
      auto& keys = keys_[ref.node];
      keys.resize(ref.node->keyslots.size());
      for (size_t i = 0; i < ref.node->keyslots.size(); ++i) {
        const abe::PolicyKeySlot& slot = ref.node->keyslots[i];
        auto tree = abe::SlotAccessTree(slot);
        if (!tree.ok() ||
            !policy::Satisfies(*tree, sk_.attributes, options_.now)) {
          continue;
        }
        if (options_.on_decapsulate) options_.on_decapsulate();
        auto key = abe::Decapsulate(pp_, slot, sk_);
        if (key.ok()) keys[i] = *key;
      }
    });
  }

  absl::StatusOr<Node> Visit(const RedactedNode& node, NodeId id,
                             const RedactedNode* sbom, NodeId sbom_id) {
    if (node.kind == NodeKind::kSbom && id != sbom_id) {
      PETRA_RETURN_IF_ERROR(CheckLink(node, id, sbom_id));
      sbom = &node;
      sbom_id = id;
    } else if (node.kind == NodeKind::kSbom) {
      sbom = &node;
    }
    std::vector<Node> children;
    children.reserve(node.children.size());
    NodeId child_id = id + 1;
    for (const RedactedNode& child : node.children) {
      PETRA_ASSIGN_OR_RETURN(Node built, Visit(child, child_id, sbom, sbom_id));
      children.push_back(std::move(built));
      child_id += merkle::CountRedacted(child);
    }
    if (node.kind == NodeKind::kField && !node.children.empty()) {
      return Lied("field node with children");
    }
    std::optional<abe::NodePlaintext> plaintext;
    if (node.marker == Marker::kPublic) {
      ScopedTimer timer(decrypt_sink_);
      auto parsed = ParsePublicContent(node.content);
      if (!parsed.ok()) return Lied("unreadable public node");
      plaintext = *std::move(parsed);
    } else {
      const auto& keys = keys_[sbom];
      if (node.slot >= sbom->keyslots.size()) {
        return Lied("redacted node refers to a missing keyslot");
      }
      if (keys[node.slot].has_value()) {
        PETRA_ASSIGN_OR_RETURN(plaintext,
                               Decrypt(node, *keys[node.slot],
                                       sbom->keyslots[node.slot]));
      } else {
        ++view_.placeholder_nodes;
        return Node::Placeholder(
            HexEncode(sbom->keyslots[node.slot].policy_id),
            HexEncode(hashes_[id]), std::move(children));
      }
    }
    const Digest recomputed = merkle::PlainHashFromPayload(
        node.kind, plaintext->salt, plaintext->payload,
        ChildPlainHashes(node));
    if (!node.plain_hash.has_value() || recomputed != *node.plain_hash) {
      return Lied("decrypted node " + std::to_string(id) +
                  " does not match its plain hash");
    }
    auto out = merkle::NodeFromPayload(node.kind, plaintext->payload);
    if (!out.ok()) return Lied("undecodable node payload");
    out->children = std::move(children);
    Salt salt;
    std::copy(plaintext->salt.begin(), plaintext->salt.end(), salt.begin());
    view_.salts[id] = salt;
    ++view_.decrypted_nodes;
    return *std::move(out);
  }

 private:
  absl::StatusOr<abe::NodePlaintext> Decrypt(const RedactedNode& node,
                                             const abe::SymmetricKey& key,
                                             const abe::PolicyKeySlot& slot) {
    ScopedTimer timer(decrypt_sink_);
    auto ct = abe::NodeCiphertext::Decode(node.content);
    if (!ct.ok()) return Lied("malformed node ciphertext");
    if (ct->policy_id != slot.policy_id) {
      return Lied("node ciphertext policy differs from its keyslot");
    }
    auto plain = abe::DecryptNode(key, *ct);
    if (!plain.ok() || plain->salt.size() != abe::kSaltSize) {
      return Lied("node ciphertext does not open under its policy key");
    }
    return plain;
  }

  absl::Status CheckLink(const RedactedNode& node, NodeId id,
                         NodeId enclosing_id) {
    if (!node.embedded.has_value()) return Lied("nested SBOM without link");
    auto proof = merkle::MembershipProof::Decode(node.embedded->link_proof);
    if (!proof.ok() || proof->TargetHash() != hashes_[id] ||
        !merkle::VerifyMembership(*proof, hashes_[enclosing_id])) {
      return Lied("embedded SBOM link proof does not verify");
    }
    return absl::OkStatus();
  }

  const abe::PublicParams& pp_;
  const abe::AttributeSecretKey& sk_;
  const ConsumeOptions& options_;
  const std::vector<Digest>& hashes_;
  DecryptedView& view_;
  double* decrypt_sink_;
  std::map<const RedactedNode*, std::vector<std::optional<abe::SymmetricKey>>>
      keys_;
};

// Locates the node at `id` and the ids of the SBOM nodes enclosing it
// (outermost first, including `id` itself when it is an SBOM).
const RedactedNode* FindNode(const RedactedNode& root, NodeId id,
                             std::vector<std::pair<NodeId, const RedactedNode*>>*
                                 sbom_chain) {
  const RedactedNode* node = &root;
  NodeId node_id = 0;
  while (true) {
    if (node->kind == NodeKind::kSbom && sbom_chain != nullptr) {
      sbom_chain->emplace_back(node_id, node);
    }
    if (node_id == id) return node;
    NodeId child_id = node_id + 1;
    const RedactedNode* next = nullptr;
    for (const RedactedNode& child : node->children) {
      const size_t size = merkle::CountRedacted(child);
      if (id < child_id + size) {
        next = &child;
        break;
      }
      child_id += size;
    }
    if (next == nullptr) return nullptr;
    node = next;
    node_id = child_id;
  }
}

}  // namespace

absl::StatusOr<RedactionResult> Redact(std::span<const sbom::SbomTree> inputs,
                                       const policy::RedactionPolicy& policy,
                                       const abe::PublicParams& pp,
                                       ByteView sk_gen,
                                       const RedactOptions& options) {
  if (inputs.empty()) {
    return Error(ErrorCode::kMalformedDocument, "no SBOM to redact");
  }
  sbom::SbomTree plain;
  {
    ScopedTimer timer(Sink(options.timings, &PhaseTimings::tree_ms));
    plain = inputs[0];
    for (size_t i = 1; i < inputs.size(); ++i) {
      plain.root.children.push_back(inputs[i].root);
    }
    PETRA_RETURN_IF_ERROR(sbom::ValidateTree(plain));
  }
  return RedactComposed(std::move(plain), policy, pp, sk_gen, options, {});
}

absl::StatusOr<RedactionResult> Compose(
    const sbom::SbomTree& parent, std::span<const RedactedSbom> children,
    const policy::RedactionPolicy& policy, const abe::PublicParams& pp,
    ByteView sk_gen, ByteView pk_gen, ByteView pk_prod,
    const RedactOptions& options) {
  std::map<std::string, const RedactedSbom*> embedded;
  sbom::SbomTree plain = parent;
  for (const RedactedSbom& child : children) {
    PETRA_RETURN_IF_ERROR(VerifySignatures(child, pk_gen, pk_prod, false));
    const std::string root_hex = HexEncode(child.merkle_root);
    embedded[root_hex] = &child;
    plain.root.children.push_back(
        Node::Placeholder(merkle::kEmbeddedSbomName, root_hex));
  }
  return RedactComposed(std::move(plain), policy, pp, sk_gen, options,
                        embedded);
}

absl::StatusOr<RedactedSbom> Countersign(const RedactedSbom& redacted,
                                         const merkle::PlainSbomBundle& plain,
                                         ByteView sk_prod) {
  auto root = merkle::MerkleRoot(redacted.root);
  if (!root.ok() || *root != redacted.merkle_root) {
    return Error(ErrorCode::kSamenessFailure,
                 "redacted tree does not hash to its merkle root");
  }
  auto report = merkle::VerifySameness(redacted.root, plain.tree.root,
                                       plain.salts);
  if (!report.ok()) {
    return Error(ErrorCode::kSamenessFailure, std::string(report.status().message()));
  }
  if (!report->AllMatch()) {
    return Error(ErrorCode::kSamenessFailure,
                 std::to_string(report->Count(merkle::NodeCheck::kMismatch)) +
                     " node(s) differ from the plaintext");
  }
  RedactedSbom out = redacted;
  out.producer_signature = Sign(sk_prod, redacted.generator_signature);
  return out;
}

absl::StatusOr<DecryptedView> Consume(const RedactedSbom& redacted,
                                      const abe::PublicParams& pp,
                                      const abe::AttributeSecretKey& sk,
                                      ByteView pk_gen, ByteView pk_prod,
                                      const ConsumeOptions& options) {
  PETRA_RETURN_IF_ERROR(VerifySignatures(redacted, pk_gen, pk_prod, true));
  PETRA_ASSIGN_OR_RETURN(std::vector<Digest> hashes,
                         merkle::RedactedPass(redacted.root));
  DecryptedView view;
  view.source_root = redacted.merkle_root;
  Decryptor decryptor(pp, sk, options, hashes, view);
  decryptor.UnlockAll(redacted.root);
  PETRA_ASSIGN_OR_RETURN(view.tree.root,
                         decryptor.Visit(redacted.root, 0, &redacted.root, 0));
  view.tree.format = sbom::SourceFormat::kNative;
  if (view.tree.root.is_sbom()) {
    auto format = sbom::ParseFormatName(view.tree.root.value);
    if (format.ok()) view.tree.format = *format;
  }
  if (options.query.has_value()) {
    PETRA_ASSIGN_OR_RETURN(NodeId id, merkle::ResolveUniqueNode(
                                          view.tree.root, *options.query));
    auto proof = merkle::ProveMembership(redacted.root, id);
    const RedactedNode* target = FindNode(redacted.root, id, nullptr);
    if (!proof.ok() || target == nullptr ||
        proof->target_plain_hash != target->plain_hash ||
        !merkle::VerifyMembership(*proof, redacted.merkle_root)) {
      return Lied("membership proof for the queried field fails");
    }
    view.query_node = id;
    view.query_proof = *std::move(proof);
  }
  return view;
}

std::vector<NodeId> EmbeddedSbomIds(const RedactedNode& root) {
  std::vector<NodeId> out;
  merkle::ForEachRedacted(root, [&](const merkle::RedactedRef& ref) {
    if (ref.id > 0 && ref.node->kind == NodeKind::kSbom) out.push_back(ref.id);
  });
  return out;
}

absl::StatusOr<RedactedSbom> ExtractEmbedded(const RedactedSbom& outer,
                                             NodeId id) {
  const RedactedNode* node = FindNode(outer.root, id, nullptr);
  if (node == nullptr || id == 0 || node->kind != NodeKind::kSbom ||
      !node->embedded.has_value()) {
    return Error(ErrorCode::kNodeNotFound,
                 "no embedded SBOM at node " + std::to_string(id));
  }
  RedactedSbom out;
  out.root = *node;
  out.root.embedded.reset();
  PETRA_ASSIGN_OR_RETURN(out.merkle_root, merkle::MerkleRoot(out.root));
  out.generator_signature = node->embedded->generator_signature;
  out.producer_signature = node->embedded->producer_signature;
  return out;
}

bool VerifyEmbeddedChain(const RedactedSbom& outer, NodeId id) {
  auto hashes = merkle::RedactedPass(outer.root);
  if (!hashes.ok() || (*hashes)[0] != outer.merkle_root) return false;
  std::vector<std::pair<NodeId, const RedactedNode*>> chain;
  const RedactedNode* node = FindNode(outer.root, id, &chain);
  if (node == nullptr || node->kind != NodeKind::kSbom || chain.size() < 2) {
    return false;
  }
  for (size_t i = 1; i < chain.size(); ++i) {
    const auto& [nested_id, nested] = chain[i];
    if (!nested->embedded.has_value()) return false;
    auto proof = merkle::MembershipProof::Decode(nested->embedded->link_proof);
    if (!proof.ok() || proof->TargetHash() != (*hashes)[nested_id] ||
        !merkle::VerifyMembership(*proof, (*hashes)[chain[i - 1].first])) {
      return false;
    }
  }
  return true;
}

}  // namespace petra::pipeline
