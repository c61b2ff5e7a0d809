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

// Key-management service core: CP-ABE setup, token-based attribute
// derivation, key issuance with monthly expiry windows, rotation,
// revocation-by-expiry and single-level delegation. The HTTP front end lives
// in petra/kms/http.h.

#ifndef PETRA_KMS_KEY_SERVICE_H_
#define PETRA_KMS_KEY_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "petra/abe/abkem.h"
#include "petra/common/bytes.h"
#include "petra/crypto/primitives.h"
#include "petra/policy/access_tree.h"

namespace petra::kms {

// Identity assertion from the (stubbed) identity provider.
struct IdentityToken {
  std::string subject;  // local@domain
  std::map<std::string, std::string> extra_claims;
  int64_t not_before = 0;  // unix seconds, inclusive
  int64_t not_after = 0;   // unix seconds, exclusive
};

// Wire form "base64(payload json).base64(ed25519 signature)".
std::string MintToken(const IdentityToken& token, ByteView authority_sk);
// AUTHENTICATION_FAILURE unless the signature verifies under `authority_pk`.
absl::StatusOr<IdentityToken> VerifyToken(std::string_view wire,
                                          ByteView authority_pk);

// {user:<local>, namespace:<domain>} plus "<claim>:<value>" for every claim
// named in `claim_mapping`, plus the expiry attribute of `now`'s month.
//   EXPIRED_TOKEN      now outside [not_before, not_after)
//   MALFORMED_SUBJECT  subject is not local@domain or yields an invalid
//                      attribute
absl::StatusOr<policy::AttributeSet> DeriveAttributes(
    const IdentityToken& token, int64_t now,
    const std::set<std::string>& claim_mapping);

struct KeyGrant {
  std::string subject;
  abe::AttributeSecretKey key;  // attributes include exactly one expiry
  int64_t issued_at = 0;
  policy::YearMonth expiry_window;
};

struct SetupOptions {
  abe::SchemeId scheme = abe::SchemeId::kBswTypeA;
  // Token claims passed through as attributes, e.g. {"role"}.
  std::set<std::string> claim_mapping;
  RandomSource* rng = nullptr;  // DefaultRandom() when null
};

// Files in a state directory.
inline constexpr char kParamsFile[] = "params.bin";
inline constexpr char kMasterKeyFile[] = "master.key";
inline constexpr char kGeneratorSecretFile[] = "generator.sk";
inline constexpr char kGeneratorPublicFile[] = "generator.pk";
inline constexpr char kProducerSecretFile[] = "producer.sk";
inline constexpr char kProducerPublicFile[] = "producer.pk";
inline constexpr char kAuthoritySecretFile[] = "token-authority.sk";
inline constexpr char kAuthorityPublicFile[] = "token-authority.pk";
inline constexpr char kConfigFile[] = "config.json";
inline constexpr char kLedgerFile[] = "ledger.jsonl";
inline constexpr char kGrantsDir[] = "grants";

// Runs CP-ABE setup and creates generator, producer and test token-authority
// signing keys under `dir`. STATE_EXISTS if `dir` already holds state.
absl::Status KmsSetup(const std::filesystem::path& dir,
                      const SetupOptions& options = {});

// Material served by GET /params.
struct PublicMaterial {
  abe::SchemeId scheme;
  Bytes params;  // byte-identical to params.bin
  Bytes generator_public_key;
  Bytes producer_public_key;
  Bytes token_authority_public_key;
};

struct LedgerEntry {
  std::string event;  // issue | rotate | delegate | revoke
  std::string subject;
  policy::AttributeSet attributes;  // without the expiry attribute
  std::string expiry;               // YYYY-MM; empty for revoke
  int64_t at = 0;
  std::string key_digest;  // hex SHA-256 of the encoded key
};

// Thread-safe. Every operation that touches the master key or the ledger
// runs under one writer lock; ledger lines are appended with a single write.
class KeyService {
 public:
  static absl::StatusOr<std::unique_ptr<KeyService>> Open(
      const std::filesystem::path& dir, RandomSource* rng = nullptr);

  const PublicMaterial& public_material() const { return public_; }

  absl::StatusOr<KeyGrant> IssueKey(std::string_view token_wire, int64_t now);

  // Re-issues `parent_key` restricted to `subset`, keeping its expiry window.
  // The parent must have been issued by this service to a non-revoked
  // subject and must not have expired.
  absl::StatusOr<KeyGrant> Delegate(ByteView parent_key,
                                    const policy::AttributeSet& subset,
                                    int64_t now);

  absl::Status Revoke(std::string_view subject, int64_t now);

  // Gives every non-revoked identity a grant for `now`'s month and writes it
  // to grants/. Identities already holding a grant for that month are
  // skipped, so repeated calls within a month return 0.
  absl::StatusOr<size_t> Rotate(int64_t now);

  std::vector<LedgerEntry> Ledger() const;
  std::filesystem::path GrantPath(std::string_view subject,
                                  policy::YearMonth window) const;

 private:
  KeyService() = default;

  absl::StatusOr<KeyGrant> IssueLocked(std::string subject,
                                       policy::AttributeSet attributes,
                                       std::string event, int64_t now);
  absl::Status AppendLocked(const LedgerEntry& entry);

  std::filesystem::path dir_;
  RandomSource* rng_ = nullptr;
  PublicMaterial public_;
  abe::PublicParams pp_;
  abe::MasterKey mk_;
  std::set<std::string> claim_mapping_;

  mutable std::mutex mu_;
  std::vector<LedgerEntry> ledger_;
};

}  // namespace petra::kms

#endif  // PETRA_KMS_KEY_SERVICE_H_
