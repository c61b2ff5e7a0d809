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

// File-based distributor store: one `.petra` container per pURL, plus a
// metadata file recording its root and signatures.

#ifndef PETRA_CLI_STORE_H_
#define PETRA_CLI_STORE_H_

#include <filesystem>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "petra/common/bytes.h"
#include "petra/merkle/merkle.h"

namespace petra::cli {

// Checks the countersignature, the generator signature and the root of
// `sbom`; FAIL_UNTRUSTED_SBOM on any failure. When `require_countersig` is
// false a missing producer signature is accepted.
absl::Status VerifyContainerSignatures(const merkle::RedactedSbom& sbom,
                                       ByteView pk_gen, ByteView pk_prod,
                                       bool require_countersig = true);

struct PublishResult {
  std::string purl;
  Digest merkle_root{};
  bool already_present = false;
};

class DistributorStore {
 public:
  DistributorStore(std::filesystem::path dir, Bytes pk_gen, Bytes pk_prod)
      : dir_(std::move(dir)),
        pk_gen_(std::move(pk_gen)),
        pk_prod_(std::move(pk_prod)) {}

  // Stores `container_text` under `purl`, or under the container's public
  // index when `purl` is empty.
  //   SIGNATURE_REJECTED  signatures or root do not verify
  //   MISSING_INDEX       no pURL given and the root metadata is redacted
  //   EQUIVOCATION        the pURL already maps to a different root
  absl::StatusOr<PublishResult> Publish(std::string_view container_text,
                                        std::string purl = "");

  // Container bytes exactly as published. NOT_FOUND for unknown pURLs.
  absl::StatusOr<std::string> Fetch(std::string_view purl) const;

 private:
  std::filesystem::path EntryPath(std::string_view purl,
                                  std::string_view extension) const;

  std::filesystem::path dir_;
  Bytes pk_gen_;
  Bytes pk_prod_;
};

}  // namespace petra::cli

#endif  // PETRA_CLI_STORE_H_
