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

// File formats for redacted SBOMs (.petra) and producer-side plaintext
// bundles (.petra-salts).

#ifndef PETRA_MERKLE_CONTAINER_H_
#define PETRA_MERKLE_CONTAINER_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/merkle/merkle.h"
#include "petra/sbom/tree.h"

namespace petra::merkle {

inline constexpr int kContainerVersion = 1;

// Canonical redacted-tree bytes. Each node is
//   u8 kind || u8 marker || [u32 slot if redacted] || lp(content) ||
//   plain_hash(32) || [sbom: keyslot table || u8 embedded ||
//   [lp(generator sig) || lp(producer sig) || lp(link proof)]] ||
//   u32 child count || children
// When `omit_root_keyslots` is set the root's table is left out; the
// container carries it in its envelope instead.
Bytes EncodeRedactedTree(const RedactedNode& root,
                         bool omit_root_keyslots = false);
absl::StatusOr<RedactedNode> DecodeRedactedTree(
    ByteView bytes, bool omit_root_keyslots = false);

// JSON envelope {format, version, merkle_root, signature_algorithm,
// signatures, keyslots, index?, tree}. `index` is the root pURL when the
// root metadata is public; it is advisory and not covered by any hash.
std::string WriteContainer(const RedactedSbom& sbom);
absl::StatusOr<RedactedSbom> ReadContainer(std::string_view text);

// Root pURL and format name, when the root metadata is public.
struct PublicIndex {
  std::string index;
  std::string format;
};
std::optional<PublicIndex> PublicRootIndex(const RedactedNode& root);

// Producer-side artifact: the composed plaintext tree, its salts keyed by
// plaintext preorder id, and the generator's signature over the root plain
// hash.
struct PlainSbomBundle {
  sbom::SbomTree tree;
  std::map<sbom::NodeId, Salt> salts;
  Digest plain_root{};
  Bytes plain_signature;
  Digest merkle_root{};  // of the redacted SBOM produced alongside
};

// JSON {format, version, merkle_root, plain_root, plain_signature, tree,
// salts: [{id, path, salt}]}.
std::string WriteSaltFile(const PlainSbomBundle& bundle);
absl::StatusOr<PlainSbomBundle> ReadSaltFile(std::string_view text);

}  // namespace petra::merkle

#endif  // PETRA_MERKLE_CONTAINER_H_
