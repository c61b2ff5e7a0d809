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

#include "petra/kms/key_service.h"

#include <nlohmann/json.hpp>

#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"

namespace petra::kms {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view kExpiryPrefix = "expiry:";

bool IsExpiry(std::string_view attribute) {
  return attribute.substr(0, kExpiryPrefix.size()) == kExpiryPrefix;
}

policy::AttributeSet WithoutExpiry(const policy::AttributeSet& attributes) {
  policy::AttributeSet out;
  for (const std::string& a : attributes) {
    if (!IsExpiry(a)) out.insert(a);
  }
  return out;
}

std::string KeyDigest(const abe::AttributeSecretKey& key) {
  return HexEncode(Sha256(abe::EncodeSecretKey(key)));
}

absl::StatusOr<Bytes> ReadBytes(const fs::path& path) {
  PETRA_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  return ToBytes(text);
}

json EntryToJson(const LedgerEntry& e) {
  return json{{"event", e.event},           {"subject", e.subject},
              {"attributes", e.attributes}, {"expiry", e.expiry},
              {"at", e.at},                 {"key_digest", e.key_digest}};
}

absl::StatusOr<LedgerEntry> EntryFromJson(const json& j) {
  try {
    LedgerEntry e;
    e.event = j.at("event").get<std::string>();
    e.subject = j.at("subject").get<std::string>();
    for (const auto& a : j.at("attributes")) {
      e.attributes.insert(a.get<std::string>());
    }
    e.expiry = j.at("expiry").get<std::string>();
    e.at = j.at("at").get<int64_t>();
    e.key_digest = j.at("key_digest").get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    return Error(ErrorCode::kIo, absl::StrCat("corrupt ledger entry: ",
                                              ex.what()));
  }
}

}  // namespace

std::string MintToken(const IdentityToken& token, ByteView authority_sk) {
  const std::string payload =
      json{{"sub", token.subject},
           {"claims", token.extra_claims},
           {"nbf", token.not_before},
           {"exp", token.not_after}}
          .dump();
  const Bytes signature = Sign(authority_sk, AsBytes(payload));
  return absl::StrCat(Base64Encode(AsBytes(payload)), ".",
                      Base64Encode(signature));
}

absl::StatusOr<IdentityToken> VerifyToken(std::string_view wire,
                                          ByteView authority_pk) {
  std::vector<std::string> parts =
      absl::StrSplit(std::string(wire), '.');
  if (parts.size() != 2) {
    return Error(ErrorCode::kAuthenticationFailure, "malformed token");
  }
  auto payload = Base64Decode(parts[0]);
  auto signature = Base64Decode(parts[1]);
  if (!payload.ok() || !signature.ok() ||
      !VerifySignature(authority_pk, *payload, *signature)) {
    return Error(ErrorCode::kAuthenticationFailure,
                 "token signature does not verify");
  }
  try {
    const json j = json::parse(ToString(*payload));
    IdentityToken token;
    token.subject = j.at("sub").get<std::string>();
    token.extra_claims =
        j.at("claims").get<std::map<std::string, std::string>>();
    token.not_before = j.at("nbf").get<int64_t>();
    token.not_after = j.at("exp").get<int64_t>();
    return token;
  } catch (const json::exception& ex) {
    return Error(ErrorCode::kAuthenticationFailure,
                 absl::StrCat("malformed token payload: ", ex.what()));
  }
}

absl::StatusOr<policy::AttributeSet> DeriveAttributes(
    const IdentityToken& token, int64_t now,
    const std::set<std::string>& claim_mapping) {
  if (now < token.not_before || now >= token.not_after) {
    return Error(ErrorCode::kExpiredToken,
                 "token is outside its validity window");
  }
  const size_t at = token.subject.find('@');
  if (at == std::string::npos || at == 0 || at + 1 == token.subject.size() ||
      token.subject.find('@', at + 1) != std::string::npos) {
    return Error(ErrorCode::kMalformedSubject,
                 absl::StrCat("subject '", token.subject,
                              "' is not of the form local@domain"));
  }
  policy::AttributeSet attributes = {
      absl::StrCat("user:", token.subject.substr(0, at)),
      absl::StrCat("namespace:", token.subject.substr(at + 1)),
  };
  for (const auto& [claim, value] : token.extra_claims) {
    if (claim_mapping.contains(claim)) {
      attributes.insert(absl::StrCat(claim, ":", value));
    }
  }
  for (const std::string& a : attributes) {
    if (!policy::IsValidAttribute(a) || IsExpiry(a)) {
      return Error(ErrorCode::kMalformedSubject,
                   absl::StrCat("'", a, "' is not a valid attribute"));
    }
  }
  attributes.insert(policy::YearMonth::FromUnixSeconds(now).ExpiryAttribute());
  return attributes;
}

absl::Status KmsSetup(const fs::path& dir, const SetupOptions& options) {
  if (fs::exists(dir / kParamsFile) || fs::exists(dir / kMasterKeyFile)) {
    return Error(ErrorCode::kStateExists,
                 absl::StrCat("key-service state already exists in ",
                              dir.string()));
  }
  std::error_code ec;
  fs::create_directories(dir / kGrantsDir, ec);
  if (ec) {
    return Error(ErrorCode::kIo, absl::StrCat("cannot create ", dir.string(),
                                              ": ", ec.message()));
  }
  RandomSource& rng = options.rng ? *options.rng : DefaultRandom();
  PETRA_ASSIGN_OR_RETURN(auto setup, abe::AbeSetup(options.scheme, rng));
  const SigningKeyPair gen = SigningKeyPair::Generate(rng);
  const SigningKeyPair prod = SigningKeyPair::Generate(rng);
  const SigningKeyPair authority = SigningKeyPair::Generate(rng);
  const json config = {{"scheme", abe::SchemeName(options.scheme)},
                       {"claim_mapping", options.claim_mapping}};
  const std::vector<std::tuple<const char*, Bytes, bool>> files = {
      {kConfigFile, ToBytes(config.dump(2)), false},
      {kParamsFile, abe::EncodePublicParams(setup.first), false},
      {kGeneratorSecretFile, gen.secret_key, true},
      {kGeneratorPublicFile, gen.public_key, false},
      {kProducerSecretFile, prod.secret_key, true},
      {kProducerPublicFile, prod.public_key, false},
      {kAuthoritySecretFile, authority.secret_key, true},
      {kAuthorityPublicFile, authority.public_key, false},
      {kMasterKeyFile, abe::EncodeMasterKey(setup.second), true},
  };
  for (const auto& [name, contents, is_private] : files) {
    PETRA_RETURN_IF_ERROR(WriteFileAtomic(dir / name, contents, is_private));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<KeyService>> KeyService::Open(
    const fs::path& dir, RandomSource* rng) {
  std::unique_ptr<KeyService> service(new KeyService());
  service->dir_ = dir;
  service->rng_ = rng ? rng : &DefaultRandom();

  PETRA_ASSIGN_OR_RETURN(Bytes params, ReadBytes(dir / kParamsFile));
  PETRA_ASSIGN_OR_RETURN(service->pp_, abe::DecodePublicParams(params));
  PETRA_ASSIGN_OR_RETURN(Bytes master, ReadBytes(dir / kMasterKeyFile));
  PETRA_ASSIGN_OR_RETURN(service->mk_, abe::DecodeMasterKey(master));
  PublicMaterial& pub = service->public_;
  pub.scheme = service->pp_.scheme;
  pub.params = std::move(params);
  PETRA_ASSIGN_OR_RETURN(pub.generator_public_key,
                         ReadBytes(dir / kGeneratorPublicFile));
  PETRA_ASSIGN_OR_RETURN(pub.producer_public_key,
                         ReadBytes(dir / kProducerPublicFile));
  PETRA_ASSIGN_OR_RETURN(pub.token_authority_public_key,
                         ReadBytes(dir / kAuthorityPublicFile));

  PETRA_ASSIGN_OR_RETURN(std::string config_text,
                         ReadFileToString(dir / kConfigFile));
  try {
    const json config = json::parse(config_text);
    service->claim_mapping_ =
        config.at("claim_mapping").get<std::set<std::string>>();
  } catch (const json::exception& ex) {
    return Error(ErrorCode::kIo, absl::StrCat("corrupt config: ", ex.what()));
  }

  auto ledger_text = ReadFileToString(dir / kLedgerFile);
  if (ledger_text.ok()) {
    std::istringstream lines(*ledger_text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded()) {
        return Error(ErrorCode::kIo, "corrupt ledger line");
      }
      PETRA_ASSIGN_OR_RETURN(LedgerEntry entry, EntryFromJson(j));
      service->ledger_.push_back(std::move(entry));
    }
  } else if (!HasErrorCode(ledger_text.status(), ErrorCode::kNotFound)) {
    return ledger_text.status();
  }
  return service;
}

absl::Status KeyService::AppendLocked(const LedgerEntry& entry) {
  PETRA_RETURN_IF_ERROR(
      AppendLine(dir_ / kLedgerFile, EntryToJson(entry).dump()));
  ledger_.push_back(entry);
  return absl::OkStatus();
}

absl::StatusOr<KeyGrant> KeyService::IssueLocked(
    std::string subject, policy::AttributeSet attributes, std::string event,
    int64_t now) {
  KeyGrant grant;
  grant.subject = std::move(subject);
  grant.issued_at = now;
  std::string expiry;
  for (const std::string& a : attributes) {
    if (IsExpiry(a)) expiry = a.substr(kExpiryPrefix.size());
  }
  PETRA_ASSIGN_OR_RETURN(grant.expiry_window, policy::YearMonth::Parse(expiry));
  PETRA_ASSIGN_OR_RETURN(grant.key,
                         abe::AbeKeyGen(pp_, mk_, attributes, *rng_));
  PETRA_RETURN_IF_ERROR(AppendLocked(LedgerEntry{
      .event = std::move(event),
      .subject = grant.subject,
      .attributes = WithoutExpiry(attributes),
      .expiry = grant.expiry_window.ToString(),
      .at = now,
      .key_digest = KeyDigest(grant.key),
  }));
  return grant;
}

absl::StatusOr<KeyGrant> KeyService::IssueKey(std::string_view token_wire,
                                              int64_t now) {
  PETRA_ASSIGN_OR_RETURN(
      IdentityToken token,
      VerifyToken(token_wire, public_.token_authority_public_key));
  PETRA_ASSIGN_OR_RETURN(policy::AttributeSet attributes,
                         DeriveAttributes(token, now, claim_mapping_));
  std::lock_guard<std::mutex> lock(mu_);
  for (const LedgerEntry& e : ledger_) {
    if (e.event == "revoke" && e.subject == token.subject) {
      return Error(ErrorCode::kAuthenticationFailure,
                   absl::StrCat("subject ", token.subject, " is revoked"));
    }
  }
  return IssueLocked(token.subject, std::move(attributes), "issue", now);
}

absl::StatusOr<KeyGrant> KeyService::Delegate(
    ByteView parent_key, const policy::AttributeSet& subset, int64_t now) {
  PETRA_ASSIGN_OR_RETURN(abe::AttributeSecretKey parent,
                         abe::DecodeSecretKey(parent_key));
  const std::string digest = KeyDigest(parent);
  std::lock_guard<std::mutex> lock(mu_);
  const LedgerEntry* origin = nullptr;
  for (const LedgerEntry& e : ledger_) {
    if ((e.event == "issue" || e.event == "rotate") && e.key_digest == digest) {
      origin = &e;
    }
  }
  if (origin == nullptr) {
    return Error(ErrorCode::kAuthenticationFailure,
                 "parent key was not issued by this service");
  }
  for (const LedgerEntry& e : ledger_) {
    if (e.event == "revoke" && e.subject == origin->subject) {
      return Error(ErrorCode::kAuthenticationFailure,
                   absl::StrCat("subject ", origin->subject, " is revoked"));
    }
  }
  PETRA_ASSIGN_OR_RETURN(policy::YearMonth window,
                         policy::YearMonth::Parse(origin->expiry));
  if (window < policy::YearMonth::FromUnixSeconds(now)) {
    return Error(ErrorCode::kExpiredToken, "parent key has expired");
  }
  if (subset.empty()) {
    return Error(ErrorCode::kEmptyAttributeSet, "delegation subset is empty");
  }
  policy::AttributeSet attributes;
  for (const std::string& a : subset) {
    if (IsExpiry(a) || !parent.attributes.contains(a)) {
      return Error(ErrorCode::kAuthenticationFailure,
                   absl::StrCat("parent key does not hold '", a, "'"));
    }
    attributes.insert(a);
  }
  attributes.insert(window.ExpiryAttribute());
  return IssueLocked(origin->subject, std::move(attributes), "delegate", now);
}

absl::Status KeyService::Revoke(std::string_view subject, int64_t now) {
  std::lock_guard<std::mutex> lock(mu_);
  bool known = false;
  for (const LedgerEntry& e : ledger_) {
    if (e.subject == subject) {
      if (e.event == "revoke") return absl::OkStatus();
      known = true;
    }
  }
  if (!known) {
    return Error(ErrorCode::kNotFound,
                 absl::StrCat("no grants for subject ", std::string(subject)));
  }
  LedgerEntry entry;
  entry.event = "revoke";
  entry.subject = std::string(subject);
  entry.at = now;
  return AppendLocked(entry);
}

fs::path KeyService::GrantPath(std::string_view subject,
                               policy::YearMonth window) const {
  return dir_ / kGrantsDir /
         absl::StrCat(HexEncode(Sha256(AsBytes(subject))).substr(0, 16), "-",
                      window.ToString(), ".key");
}

absl::StatusOr<size_t> KeyService::Rotate(int64_t now) {
  const policy::YearMonth window = policy::YearMonth::FromUnixSeconds(now);
  std::lock_guard<std::mutex> lock(mu_);
  // Latest directly issued attribute set per identity.
  std::map<std::string, policy::AttributeSet> identities;
  std::set<std::string> revoked, current;
  for (const LedgerEntry& e : ledger_) {
    if (e.event == "issue" || e.event == "rotate") {
      identities[e.subject] = e.attributes;
      if (e.expiry == window.ToString()) current.insert(e.subject);
    } else if (e.event == "revoke") {
      revoked.insert(e.subject);
    }
  }
  size_t reissued = 0;
  for (auto& [subject, attributes] : identities) {
    if (revoked.contains(subject) || current.contains(subject)) continue;
    attributes.insert(window.ExpiryAttribute());
    PETRA_ASSIGN_OR_RETURN(KeyGrant grant,
                           IssueLocked(subject, attributes, "rotate", now));
    PETRA_RETURN_IF_ERROR(WriteFileAtomic(GrantPath(subject, window),
                                          abe::EncodeSecretKey(grant.key),
                                          /*private_file=*/true));
    ++reissued;
  }
  return reissued;
}

std::vector<LedgerEntry> KeyService::Ledger() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ledger_;
}

}  // namespace petra::kms
