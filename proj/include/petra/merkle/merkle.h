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

// Salted commitments, the plaintext and redacted Merkle passes over SBOM
// trees, membership proofs and sameness checks.
//
// Every hash input is a canonical length-prefixed encoding (lp = 4-byte
// big-endian length || bytes), H = SHA-256:
//
//   Commit(salt, d)  = H(lp(salt) || lp(d))
//   field plain      = Commit(salt, lp(name) || lp(value))
//   complex plain    = H(lp(Commit(salt, lp(t))) || lp(child plain)...)
//   sbom plain       = H(lp(Commit(salt, lp(index) || lp(meta))) || ...)
//
// A redacted node hashes as H(head || lp(plain) || lp(child hash)...), with
//   redacted head    = 0x52 || lp(A_n) || lp(NodeCiphertext)
//   public head      = 0x50 || lp(lp(salt) || lp(payload))
//   sbom head        = lp(lp(keyslot table) || lp(meta head))
// where A_n is the canonical access-tree encoding and the sbom meta head is
// the redacted or public head of the index/format payload. The hash of the
// root SBOM node is the merkle root.

#ifndef PETRA_MERKLE_MERKLE_H_
#define PETRA_MERKLE_MERKLE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/abe/abkem.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"
#include "petra/policy/redaction_policy.h"
#include "petra/sbom/tree.h"

namespace petra::merkle {

using Salt = std::array<uint8_t, abe::kSaltSize>;

// ---------------------------------------------------------------------------
// Commitments and the plaintext pass.

Digest Commit(ByteView salt, ByteView data);
bool VerifyCommitment(const Digest& digest, ByteView salt, ByteView data);

// Own content of a node, excluding children:
//   field lp(name) || lp(value); complex lp(t); sbom lp(index) || lp(meta).
Bytes NodePayload(const sbom::Node& node);
// Inverse of NodePayload for the given kind; children are left empty.
absl::StatusOr<sbom::Node> NodeFromPayload(sbom::NodeKind kind,
                                           ByteView payload);

// Plain hash of one node given its salt and its children's plain hashes.
Digest PlainHash(const sbom::Node& node, ByteView salt,
                 std::span<const Digest> child_plain_hashes);
// Same, from an already-encoded payload.
Digest PlainHashFromPayload(sbom::NodeKind kind, ByteView salt,
                            ByteView payload,
                            std::span<const Digest> child_plain_hashes);

// Per-node results indexed by preorder NodeId.
struct PlainPass {
  std::vector<Digest> plain_hashes;
  std::vector<Salt> salts;
};

// Draws a fresh salt per node and hashes bottom-up. Placeholders are
// rejected.
absl::StatusOr<PlainPass> ComputePlainPass(const sbom::Node& root,
                                           RandomSource& rng);
// Recomputes plain hashes from known salts.
absl::StatusOr<std::vector<Digest>> RecomputePlainHashes(
    const sbom::Node& root, const std::vector<Salt>& salts);

// ---------------------------------------------------------------------------
// Redacted trees.

enum class Marker : uint8_t { kRedacted = 0x52, kPublic = 0x50 };

struct MembershipProof;

// Data kept alongside a nested SBOM that is not part of any hash: the
// signatures it carried when it was composed in, and the proof linking its
// root into the enclosing structure.
struct EmbeddedInfo {
  Bytes generator_signature;
  Bytes producer_signature;
  Bytes link_proof;  // encoded MembershipProof to the enclosing root

  friend bool operator==(const EmbeddedInfo&, const EmbeddedInfo&) = default;
};

struct RedactedNode {
  sbom::NodeKind kind = sbom::NodeKind::kField;  // never kPlaceholder
  Marker marker = Marker::kPublic;
  uint32_t slot = 0;  // kRedacted: index into the enclosing keyslot table
  // kRedacted: NodeCiphertext encoding; kPublic: lp(salt) || lp(payload).
  Bytes content;
  std::optional<Digest> plain_hash;
  // kSbom only.
  std::vector<abe::PolicyKeySlot> keyslots;
  std::optional<EmbeddedInfo> embedded;  // set on nested SBOMs
  std::vector<RedactedNode> children;

  friend bool operator==(const RedactedNode&, const RedactedNode&) = default;
};

struct RedactedSbom {
  RedactedNode root;  // kind kSbom
  Digest merkle_root{};
  Bytes generator_signature;
  Bytes producer_signature;  // empty until countersigned

  friend bool operator==(const RedactedSbom&, const RedactedSbom&) = default;
};

// Visits nodes in preorder; `keyslots` is the table of the nearest
// enclosing SBOM node (the node itself for kSbom).
struct RedactedRef {
  sbom::NodeId id;
  const RedactedNode* node;
  const std::vector<abe::PolicyKeySlot>* keyslots;
  size_t depth;
};
void ForEachRedacted(const RedactedNode& root,
                     const std::function<void(const RedactedRef&)>& fn);
size_t CountRedacted(const RedactedNode& root);

// Encoded keyslot table: u32 count || (policy_id || lp(slot bytes))*.
Bytes EncodeKeyslotTable(std::span<const abe::PolicyKeySlot> keyslots);
absl::StatusOr<std::vector<abe::PolicyKeySlot>> DecodeKeyslotTable(
    ByteReader& reader);

// Canonical access-tree encoding stored in a keyslot.
absl::StatusOr<Bytes> SlotAccessEncoding(const abe::PolicyKeySlot& slot);

// Head bytes of one node (see the file comment).
absl::StatusOr<Bytes> NodeHead(
    const RedactedNode& node,
    std::span<const abe::PolicyKeySlot> enclosing_keyslots);

Digest NodeHash(ByteView head, const Digest& plain_hash,
                std::span<const Digest> child_hashes);

// Redacted hashes of all nodes in preorder; [0] is the merkle root. Fails
// with MISSING_PLAIN_HASH if any node lacks its plain hash.
absl::StatusOr<std::vector<Digest>> RedactedPass(const RedactedNode& root);
absl::StatusOr<Digest> MerkleRoot(const RedactedNode& root);

// ---------------------------------------------------------------------------
// Membership proofs.

struct ProofStep {
  Bytes head;  // of the parent
  Digest plain_hash{};
  uint32_t position = 0;        // index of the proven child
  std::vector<Digest> siblings;  // all other children, in order

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct MembershipProof {
  Bytes target_head;
  Digest target_plain_hash{};
  std::vector<Digest> target_children;
  std::vector<ProofStep> path;  // from the target's parent up to the root
  Digest root{};

  Digest TargetHash() const;
  Bytes Encode() const;
  static absl::StatusOr<MembershipProof> Decode(ByteView bytes);

  friend bool operator==(const MembershipProof&,
                         const MembershipProof&) = default;
};

// Fails with NODE_NOT_FOUND for an out-of-range id.
absl::StatusOr<MembershipProof> ProveMembership(const RedactedNode& root,
                                                sbom::NodeId id);
// Resolves `selector` over `view`, a tree whose preorder ids align with
// `root` (the plaintext or a decrypted view). Fails with NODE_NOT_FOUND or
// AMBIGUOUS_PATH unless exactly one node matches.
absl::StatusOr<sbom::NodeId> ResolveUniqueNode(
    const sbom::Node& view, const policy::PathSelector& selector);

bool VerifyMembership(const MembershipProof& proof, const Digest& root);

// ---------------------------------------------------------------------------
// Sameness.

enum class NodeCheck { kMatch, kMismatch, kUnverifiable, kAssumed };

struct SamenessReport {
  std::vector<NodeCheck> nodes;  // indexed by redacted preorder id

  size_t Count(NodeCheck check) const;
  bool AllMatch() const;  // no mismatches and nothing unverifiable
};

// Placeholder name marking a nested redacted SBOM whose plaintext the holder
// does not have; its value is the hex merkle root of that SBOM.
inline constexpr char kEmbeddedSbomName[] = "embedded-sbom";

// Walks `plaintext` and `redacted` in parallel, recomputes plain hashes from
// the plaintext and `salts` (keyed by plaintext preorder id) and compares
// them with the embedded ones. Placeholder nodes are unverifiable; opaque
// embedded SBOMs are assumed. Fails with SALT_MISSING when a plaintext node
// has no salt.
absl::StatusOr<SamenessReport> VerifySameness(
    const RedactedNode& redacted, const sbom::Node& plaintext,
    const std::map<sbom::NodeId, Salt>& salts);

std::map<sbom::NodeId, Salt> SaltMap(const std::vector<Salt>& salts);

}  // namespace petra::merkle

#endif  // PETRA_MERKLE_MERKLE_H_
