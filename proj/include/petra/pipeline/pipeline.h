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

// Redaction (compose, commit, encrypt, merkleize, sign), producer
// countersigning, consumption (verify, decapsulate, decrypt, check) and
// composition of already-redacted SBOMs.

#ifndef PETRA_PIPELINE_PIPELINE_H_
#define PETRA_PIPELINE_PIPELINE_H_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/abe/abkem.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"
#include "petra/merkle/container.h"
#include "petra/merkle/merkle.h"
#include "petra/policy/redaction_policy.h"
#include "petra/sbom/tree.h"

namespace petra::pipeline {

// Wall-clock time per processing pass, in milliseconds. Accumulates across
// calls.
struct PhaseTimings {
  double tree_ms = 0;     // composition, validation, policy resolution
  double encrypt_ms = 0;  // encapsulation and node encryption
  double merkle_ms = 0;   // salts, commitments, hashing, proofs, signing
  double decrypt_ms = 0;  // decapsulation and node decryption
};

struct RedactOptions {
  RandomSource* rng = nullptr;  // DefaultRandom() when null
  // Month used for policies that enforce expiry without a fixed window.
  policy::YearMonth now = policy::YearMonth::Now();
  PhaseTimings* timings = nullptr;
};

struct RedactionResult {
  merkle::PlainSbomBundle plain;
  merkle::RedactedSbom redacted;
};

// Composes `inputs` into one tree (inputs[1..] become child SBOM nodes of
// inputs[0]) and redacts it. Every SBOM node is redacted as a standalone
// SBOM with its own keyslot table, resolving `policy` relative to itself, so
// a nested SBOM hashes to the same kind of root it would have on its own.
// The result is signed with `sk_gen` but not yet countersigned.
absl::StatusOr<RedactionResult> Redact(std::span<const sbom::SbomTree> inputs,
                                       const policy::RedactionPolicy& policy,
                                       const abe::PublicParams& pp,
                                       ByteView sk_gen,
                                       const RedactOptions& options = {});

// Embeds already-redacted SBOMs as children of `parent`'s root. Each child
// must carry a valid generator signature under `pk_gen` (and, if present, a
// valid countersignature under `pk_prod`); otherwise FAIL_UNTRUSTED_SBOM.
absl::StatusOr<RedactionResult> Compose(
    const sbom::SbomTree& parent,
    std::span<const merkle::RedactedSbom> children,
    const policy::RedactionPolicy& policy, const abe::PublicParams& pp,
    ByteView sk_gen, ByteView pk_gen, ByteView pk_prod,
    const RedactOptions& options = {});

// Producer endorsement. Refuses with SAMENESS_FAILURE unless the redacted
// tree recomputes to its stated root and every node's plain hash matches
// `plain` (embedded SBOMs are taken as given).
absl::StatusOr<merkle::RedactedSbom> Countersign(
    const merkle::RedactedSbom& redacted, const merkle::PlainSbomBundle& plain,
    ByteView sk_prod);

struct ConsumeOptions {
  policy::YearMonth now = policy::YearMonth::Now();
  // Optional field whose membership is proven against the root.
  std::optional<policy::PathSelector> query;
  // Called once per keyslot decapsulation attempt.
  std::function<void()> on_decapsulate;
  PhaseTimings* timings = nullptr;
};

// Consumer view of a redacted SBOM. Node ids align with the redacted tree.
struct DecryptedView {
  sbom::SbomTree tree;  // inaccessible nodes are placeholders
  std::map<sbom::NodeId, merkle::Salt> salts;
  Digest source_root{};
  size_t decrypted_nodes = 0;
  size_t placeholder_nodes = 0;
  std::optional<sbom::NodeId> query_node;
  std::optional<merkle::MembershipProof> query_proof;
};

// Checks the countersignature, then the generator signature, then
// decapsulates every satisfiable keyslot, decrypts what it can, checks each
// decrypted node against its plain hash and finally proves membership of
// the queried field.
//   FAIL_UNTRUSTED_SBOM           a signature does not verify
//   FAIL_GENERATOR_PRODUCER_LIED  decrypted content, an embedded link or the
//                                 query proof does not check out
// Keyslots the key cannot open leave placeholders; they are not errors.
absl::StatusOr<DecryptedView> Consume(const merkle::RedactedSbom& redacted,
                                      const abe::PublicParams& pp,
                                      const abe::AttributeSecretKey& sk,
                                      ByteView pk_gen, ByteView pk_prod,
                                      const ConsumeOptions& options = {});

// Preorder ids of every nested SBOM node.
std::vector<sbom::NodeId> EmbeddedSbomIds(const merkle::RedactedNode& root);

// The nested SBOM at `id` as a standalone RedactedSbom: its subtree, its own
// root, and the signatures recorded when it was embedded.
absl::StatusOr<merkle::RedactedSbom> ExtractEmbedded(
    const merkle::RedactedSbom& outer, sbom::NodeId id);

// Checks the stored link proofs from the nested SBOM at `id` up through each
// enclosing SBOM to `outer.merkle_root`.
bool VerifyEmbeddedChain(const merkle::RedactedSbom& outer, sbom::NodeId id);

}  // namespace petra::pipeline

#endif  // PETRA_PIPELINE_PIPELINE_H_
