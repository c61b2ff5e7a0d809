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

#include "petra/cli/store.h"

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/crypto/primitives.h"
#include "petra/merkle/container.h"
#include "petra/sbom/purl.h"

namespace petra::cli {

namespace fs = std::filesystem;

absl::Status VerifyContainerSignatures(const merkle::RedactedSbom& sbom,
                                       ByteView pk_gen, ByteView pk_prod,
                                       bool require_countersig) {
  if (require_countersig || !sbom.producer_signature.empty()) {
    if (!VerifySignature(pk_prod, sbom.generator_signature,
                         sbom.producer_signature)) {
      return Error(ErrorCode::kUntrustedSbom,
                   "producer countersignature does not verify");
    }
  }
  auto root = merkle::MerkleRoot(sbom.root);
  if (!root.ok() || *root != sbom.merkle_root) {
    return Error(ErrorCode::kUntrustedSbom,
                 "tree does not hash to the stated merkle root");
  }
  if (!VerifySignature(pk_gen, sbom.merkle_root, sbom.generator_signature)) {
    return Error(ErrorCode::kUntrustedSbom,
                 "generator signature does not verify");
  }
  return absl::OkStatus();
}

fs::path DistributorStore::EntryPath(std::string_view purl,
                                     std::string_view extension) const {
  return dir_ / absl::StrCat(sbom::PurlEncode(purl), std::string(extension));
}

absl::StatusOr<PublishResult> DistributorStore::Publish(
    std::string_view container_text, std::string purl) {
  auto sbom = merkle::ReadContainer(container_text);
  if (!sbom.ok()) {
    return Error(ErrorCode::kSignatureRejected,
                 absl::StrCat("unreadable container: ",
                              std::string(sbom.status().message())));
  }
  absl::Status verified =
      VerifyContainerSignatures(*sbom, pk_gen_, pk_prod_);
  if (!verified.ok()) {
    return Error(ErrorCode::kSignatureRejected,
                 std::string(verified.message()));
  }
  if (purl.empty()) {
    auto index = merkle::PublicRootIndex(sbom->root);
    if (!index.has_value()) {
      return Error(ErrorCode::kMissingIndex,
                   "container has no public index; pass a pURL");
    }
    purl = index->index;
  }
  if (!sbom::IsValidPurl(purl)) {
    return Error(ErrorCode::kMissingIndex,
                 absl::StrCat("'", purl, "' is not a valid pURL"));
  }
  PublishResult result{purl, sbom->merkle_root, false};
  auto existing = Fetch(purl);
  if (existing.ok()) {
    auto previous = merkle::ReadContainer(*existing);
    if (previous.ok() && previous->merkle_root == sbom->merkle_root) {
      result.already_present = true;
      return result;
    }
    return Error(ErrorCode::kEquivocation,
                 absl::StrCat(purl, " is already published with root ",
                              previous.ok() ? HexEncode(previous->merkle_root)
                                            : std::string("(unreadable)")));
  }
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) {
    return Error(ErrorCode::kIo,
                 absl::StrCat("cannot create store ", dir_.string()));
  }
  const nlohmann::json meta = {
      {"purl", purl},
      {"merkle_root", HexEncode(sbom->merkle_root)},
      {"generator_signature", Base64Encode(sbom->generator_signature)},
      {"producer_signature", Base64Encode(sbom->producer_signature)}};
  PETRA_RETURN_IF_ERROR(
      WriteFileAtomic(EntryPath(purl, ".petra"), AsBytes(container_text)));
  PETRA_RETURN_IF_ERROR(
      WriteFileAtomic(EntryPath(purl, ".meta.json"), AsBytes(meta.dump(2))));
  return result;
}

absl::StatusOr<std::string> DistributorStore::Fetch(
    std::string_view purl) const {
  auto text = ReadFileToString(EntryPath(purl, ".petra"));
  if (!text.ok() && HasErrorCode(text.status(), ErrorCode::kNotFound)) {
    return Error(ErrorCode::kNotFound,
                 absl::StrCat("no SBOM published for ", std::string(purl)));
  }
  return text;
}

}  // namespace petra::cli
