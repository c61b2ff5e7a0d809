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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <thread>

#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/kms/http.h"
#include "petra/pipeline/pipeline.h"
#include "support/fixtures.h"

namespace petra::kms {
namespace {

namespace fs = std::filesystem;

// 2025-06-15T00:00:00Z and 2025-07-15T00:00:00Z.
constexpr int64_t kJune = 1749945600;
constexpr int64_t kJuly = 1752537600;

IdentityToken Token(std::string subject, int64_t now = kJune) {
  return IdentityToken{.subject = std::move(subject),
                       .not_before = now - 60,
                       .not_after = now + 3600};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("petra-kms-" + HexEncode(DefaultRandom().Take(8)));
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class KeyServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SetupOptions options;
    options.scheme = abe::SchemeId::kInsecureTest;
    options.claim_mapping = {"role"};
    options.rng = &rng_;
    ASSERT_TRUE(KmsSetup(dir_.path(), options).ok());
    auto service = KeyService::Open(dir_.path(), &rng_);
    ASSERT_TRUE(service.ok()) << service.status();
    service_ = *std::move(service);
    authority_sk_ = ToBytes(
        *ReadFileToString(dir_.path() / kAuthoritySecretFile));
  }

  std::string Mint(const IdentityToken& token) {
    return MintToken(token, authority_sk_);
  }

  // Encapsulates under `expression` and reports whether `key` opens it at
  // `now`, applying the consumer's expiry check first.
  bool Opens(const abe::AttributeSecretKey& key, std::string_view expression,
             int64_t now) {
    auto pp = abe::DecodePublicParams(service_->public_material().params);
    auto tree = policy::ParseAccessExpression(expression);
    auto encap = abe::Encapsulate(*pp, *tree, rng_);
    if (!policy::Satisfies(*tree, key.attributes,
                           policy::YearMonth::FromUnixSeconds(now))) {
      return false;
    }
    auto opened = abe::Decapsulate(*pp, encap->second, key);
    return opened.ok() && *opened == encap->first;
  }

  DeterministicRandom rng_{77};
  TempDir dir_;
  std::unique_ptr<KeyService> service_;
  Bytes authority_sk_;
};

TEST(DeriveAttributesTest, DecomposesSubject) {
  auto attrs = DeriveAttributes(Token("foo@bar.com"), kJune, {});
  ASSERT_TRUE(attrs.ok()) << attrs.status();
  EXPECT_EQ(*attrs, (policy::AttributeSet{"user:foo", "namespace:bar.com",
                                          "expiry:2025-06"}));
}

TEST(DeriveAttributesTest, MapsConfiguredClaimsOnly) {
  IdentityToken token = Token("foo@bar.com");
  token.extra_claims = {{"role", "auditor"}, {"team", "red"}};
  auto attrs = DeriveAttributes(token, kJune, {"role"});
  ASSERT_TRUE(attrs.ok());
  EXPECT_TRUE(attrs->contains("role:auditor"));
  EXPECT_FALSE(attrs->contains("team:red"));
  EXPECT_EQ(attrs->size(), 4u);
}

TEST(DeriveAttributesTest, RejectsBadTokens) {
  EXPECT_TRUE(HasErrorCode(DeriveAttributes(Token("foo"), kJune, {}),
                           ErrorCode::kMalformedSubject));
  EXPECT_TRUE(HasErrorCode(DeriveAttributes(Token("a@b@c"), kJune, {}),
                           ErrorCode::kMalformedSubject));
  EXPECT_TRUE(HasErrorCode(DeriveAttributes(Token("foo@bar.com"), kJuly, {}),
                           ErrorCode::kExpiredToken));
}

TEST(TokenTest, SignatureIsChecked) {
  DeterministicRandom rng(1);
  const SigningKeyPair authority = SigningKeyPair::Generate(rng);
  const SigningKeyPair other = SigningKeyPair::Generate(rng);
  const std::string wire = MintToken(Token("foo@bar.com"), authority.secret_key);
  auto token = VerifyToken(wire, authority.public_key);
  ASSERT_TRUE(token.ok());
  EXPECT_EQ(token->subject, "foo@bar.com");
  EXPECT_TRUE(HasErrorCode(VerifyToken(wire, other.public_key),
                           ErrorCode::kAuthenticationFailure));
  std::string forged = MintToken(Token("root@bar.com"), other.secret_key);
  forged = forged.substr(0, forged.find('.')) + wire.substr(wire.find('.'));
  EXPECT_TRUE(HasErrorCode(VerifyToken(forged, authority.public_key),
                           ErrorCode::kAuthenticationFailure));
}

TEST_F(KeyServiceTest, SetupRefusesToOverwrite) {
  for (const char* name : {kParamsFile, kMasterKeyFile, kGeneratorSecretFile,
                           kProducerSecretFile, kAuthorityPublicFile}) {
    EXPECT_TRUE(fs::exists(dir_.path() / name)) << name;
  }
  const auto before = ReadFileToString(dir_.path() / kMasterKeyFile);
  EXPECT_TRUE(
      HasErrorCode(KmsSetup(dir_.path()), ErrorCode::kStateExists));
  EXPECT_EQ(ReadFileToString(dir_.path() / kMasterKeyFile), before);
  EXPECT_EQ((fs::status(dir_.path() / kMasterKeyFile).permissions() &
             fs::perms::others_read),
            fs::perms::none);
}

TEST_F(KeyServiceTest, IssuedKeyDecryptsNamespaceCiphertext) {
  auto grant = service_->IssueKey(Mint(Token("foo@bar.com")), kJune);
  ASSERT_TRUE(grant.ok()) << grant.status();
  EXPECT_EQ(grant->expiry_window.ToString(), "2025-06");
  EXPECT_EQ(std::count_if(grant->key.attributes.begin(),
                          grant->key.attributes.end(),
                          [](const std::string& a) {
                            return a.starts_with("expiry:");
                          }),
            1);
  EXPECT_TRUE(Opens(grant->key, "namespace:bar.com AND expiry:2025-06", kJune));
  EXPECT_FALSE(Opens(grant->key, "namespace:baz.com AND expiry:2025-06", kJune));
  EXPECT_FALSE(Opens(grant->key, "namespace:bar.com AND expiry:2025-07", kJuly));
}

TEST_F(KeyServiceTest, RepeatedIssuanceIsLedgered) {
  const std::string token = Mint(Token("foo@bar.com"));
  auto a = service_->IssueKey(token, kJune);
  auto b = service_->IssueKey(token, kJune);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->key.attributes, b->key.attributes);
  EXPECT_TRUE(Opens(b->key, "user:foo", kJune));
  EXPECT_EQ(service_->Ledger().size(), 2u);
  // The ledger survives a restart.
  auto reopened = KeyService::Open(dir_.path());
  ASSERT_TRUE(reopened.ok());
  EXPECT_EQ((*reopened)->Ledger().size(), 2u);
}

TEST_F(KeyServiceTest, BadTokenSignatureFails) {
  DeterministicRandom rng(3);
  const SigningKeyPair impostor = SigningKeyPair::Generate(rng);
  EXPECT_TRUE(HasErrorCode(
      service_->IssueKey(MintToken(Token("foo@bar.com"), impostor.secret_key),
                         kJune),
      ErrorCode::kAuthenticationFailure));
  EXPECT_TRUE(service_->Ledger().empty());
}

TEST_F(KeyServiceTest, RotationSkipsRevokedAndIsIdempotent) {
  for (const char* who : {"a@x.org", "b@x.org", "c@x.org", "d@x.org"}) {
    ASSERT_TRUE(service_->IssueKey(Mint(Token(who)), kJune).ok());
  }
  auto revoked_grant = service_->IssueKey(Mint(Token("d@x.org")), kJune);
  ASSERT_TRUE(service_->Revoke("d@x.org", kJune).ok());
  auto rotated = service_->Rotate(kJuly);
  ASSERT_TRUE(rotated.ok()) << rotated.status();
  EXPECT_EQ(*rotated, 3u);
  EXPECT_EQ(*service_->Rotate(kJuly), 0u);
  EXPECT_EQ(*service_->Rotate(kJune + 60), 0u);  // June grants exist

  const policy::YearMonth july = policy::YearMonth::FromUnixSeconds(kJuly);
  auto renewed = ReadFileToString(service_->GrantPath("a@x.org", july));
  ASSERT_TRUE(renewed.ok());
  auto key = abe::DecodeSecretKey(AsBytes(*renewed));
  ASSERT_TRUE(key.ok());
  EXPECT_TRUE(Opens(*key, "namespace:x.org AND expiry:2025-07", kJuly));
  EXPECT_FALSE(fs::exists(service_->GrantPath("d@x.org", july)));
  EXPECT_FALSE(
      Opens(revoked_grant->key, "namespace:x.org AND expiry:2025-07", kJuly));
  EXPECT_TRUE(HasErrorCode(
      service_->IssueKey(Mint(Token("d@x.org", kJuly)), kJuly),
      ErrorCode::kAuthenticationFailure));
}

TEST_F(KeyServiceTest, DelegationRestrictsAttributes) {
  IdentityToken token = Token("foo@bar.com");
  token.extra_claims = {{"role", "auditor"}};
  auto parent = service_->IssueKey(Mint(token), kJune);
  ASSERT_TRUE(parent.ok());
  auto child = service_->Delegate(abe::EncodeSecretKey(parent->key),
                                  {"role:auditor"}, kJune);
  ASSERT_TRUE(child.ok()) << child.status();
  EXPECT_EQ(child->key.attributes,
            (policy::AttributeSet{"role:auditor", "expiry:2025-06"}));
  EXPECT_TRUE(Opens(child->key, "role:auditor", kJune));
  EXPECT_FALSE(Opens(child->key, "user:foo", kJune));

  EXPECT_TRUE(HasErrorCode(
      service_->Delegate(abe::EncodeSecretKey(parent->key), {"role:admin"},
                         kJune),
      ErrorCode::kAuthenticationFailure));
  // A delegated key cannot itself delegate.
  EXPECT_TRUE(HasErrorCode(
      service_->Delegate(abe::EncodeSecretKey(child->key), {"role:auditor"},
                         kJune),
      ErrorCode::kAuthenticationFailure));
  EXPECT_TRUE(HasErrorCode(
      service_->Delegate(abe::EncodeSecretKey(parent->key), {"role:auditor"},
                         kJuly),
      ErrorCode::kExpiredToken));
}

TEST_F(KeyServiceTest, ConcurrentIssuanceKeepsLedgerConsistent) {
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([this, i] {
      const std::string who = "u" + std::to_string(i) + "@x.org";
      for (int j = 0; j < 5; ++j) {
        ASSERT_TRUE(service_->IssueKey(Mint(Token(who)), kJune).ok());
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(service_->Ledger().size(), 40u);
  auto reopened = KeyService::Open(dir_.path());
  ASSERT_TRUE(reopened.ok()) << reopened.status();
  EXPECT_EQ((*reopened)->Ledger().size(), 40u);
}

// The HTTP tests run the pairing scheme: the insecure test scheme embeds the
// master secret in its public parameters by design.
class KmsHttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SetupOptions options;
    options.scheme = abe::SchemeId::kBswTypeA;
    options.claim_mapping = {"role"};
    options.rng = &rng_;
    ASSERT_TRUE(KmsSetup(dir_.path(), options).ok());
    service_ = *KeyService::Open(dir_.path(), &rng_);
    server_ = std::make_unique<KmsHttpServer>(*service_, [this] { return now_.load(); });
    ASSERT_TRUE(server_->Bind("127.0.0.1", 0).ok());
    server_->Start();
    client_ = std::make_unique<KmsClient>(
        "http://127.0.0.1:" + std::to_string(server_->port()));
    authority_sk_ =
        ToBytes(*ReadFileToString(dir_.path() / kAuthoritySecretFile));
  }
  void TearDown() override { server_->Stop(); }

  std::string Mint(std::string subject,
                   std::map<std::string, std::string> claims = {}) {
    IdentityToken token = Token(std::move(subject), now_);
    token.extra_claims = std::move(claims);
    return MintToken(token, authority_sk_);
  }

  DeterministicRandom rng_{78};
  TempDir dir_;
  std::atomic<int64_t> now_{kJune};
  std::unique_ptr<KeyService> service_;
  std::unique_ptr<KmsHttpServer> server_;
  std::unique_ptr<KmsClient> client_;
  Bytes authority_sk_;
};

TEST_F(KmsHttpTest, ParamsMatchPersistedFile) {
  auto pub = client_->Params();
  ASSERT_TRUE(pub.ok()) << pub.status();
  EXPECT_EQ(pub->params, ToBytes(*ReadFileToString(dir_.path() / kParamsFile)));
  EXPECT_EQ(pub->generator_public_key,
            ToBytes(*ReadFileToString(dir_.path() / kGeneratorPublicFile)));
  EXPECT_EQ(pub->scheme, abe::SchemeId::kBswTypeA);
}

TEST_F(KmsHttpTest, IssueThenDecryptFixtureEndToEnd) {
  const fs::path state = dir_.path();
  auto pub = client_->Params();
  ASSERT_TRUE(pub.ok());
  auto pp = abe::DecodePublicParams(pub->params);
  ASSERT_TRUE(pp.ok());

  const sbom::SbomTree input = testing::TenNodeTree();
  const auto policy = testing::MustParsePolicy(
      R"({"rules":[{"paths":["**.version"],"access":"namespace:bar.com"}],
          "enforce_expiry":true,"expiry_window":"2025-06"})");
  pipeline::RedactOptions options;
  options.rng = &rng_;
  const Bytes sk_gen = ToBytes(*ReadFileToString(state / kGeneratorSecretFile));
  const Bytes sk_prod = ToBytes(*ReadFileToString(state / kProducerSecretFile));
  auto r = pipeline::Redact(std::span(&input, 1), policy, *pp, sk_gen, options);
  ASSERT_TRUE(r.ok()) << r.status();
  auto sbom = pipeline::Countersign(r->redacted, r->plain, sk_prod);
  ASSERT_TRUE(sbom.ok());

  auto grant = client_->IssueKey(Mint("foo@bar.com"));
  ASSERT_TRUE(grant.ok()) << grant.status();
  pipeline::ConsumeOptions consume;
  consume.now = *policy::YearMonth::Parse("2025-06");
  auto view = pipeline::Consume(*sbom, *pp, grant->key,
                                pub->generator_public_key,
                                pub->producer_public_key, consume);
  ASSERT_TRUE(view.ok()) << view.status();
  EXPECT_EQ(view->placeholder_nodes, 0u);
  EXPECT_EQ(view->tree.root, input.root);

  // After the window closes the same key opens nothing.
  consume.now = *policy::YearMonth::Parse("2025-07");
  auto late = pipeline::Consume(*sbom, *pp, grant->key,
                                pub->generator_public_key,
                                pub->producer_public_key, consume);
  ASSERT_TRUE(late.ok());
  EXPECT_EQ(late->placeholder_nodes, 2u);
}

TEST_F(KmsHttpTest, ErrorsCarryCodes) {
  EXPECT_TRUE(HasErrorCode(client_->IssueKey("garbage"),
                           ErrorCode::kAuthenticationFailure));
  EXPECT_TRUE(HasErrorCode(client_->IssueKey(Mint("nobody")),
                           ErrorCode::kMalformedSubject));
  EXPECT_TRUE(HasErrorCode(client_->Revoke("ghost@x.org"),
                           ErrorCode::kNotFound));
  auto raw = client_->Post("/keys", "not json");
  ASSERT_TRUE(raw.ok());
  EXPECT_EQ(raw->status, 400);
}

TEST_F(KmsHttpTest, RotateRevokeDelegateOverHttp) {
  auto a = client_->IssueKey(Mint("a@x.org", {{"role", "auditor"}}));
  auto b = client_->IssueKey(Mint("b@x.org"));
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_TRUE(client_->Revoke("b@x.org").ok());
  auto child = client_->Delegate(a->key, {"role:auditor"});
  ASSERT_TRUE(child.ok()) << child.status();
  EXPECT_TRUE(child->key.attributes.contains("expiry:2025-06"));
  now_ = kJuly;
  auto rotated = client_->Rotate();
  ASSERT_TRUE(rotated.ok());
  EXPECT_EQ(*rotated, 1u);
}

// Collects every byte string a response exposes: the raw body plus every
// string value that decodes as base64 or hex.
void CollectExposed(const nlohmann::json& j, std::vector<Bytes>& out) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    out.push_back(ToBytes(s));
    if (auto b = Base64Decode(s); b.ok()) out.push_back(*b);
    if (auto h = HexDecode(s); h.ok()) out.push_back(*h);
  } else if (j.is_structured()) {
    for (const auto& item : j) CollectExposed(item, out);
  }
}

bool ContainsWindow(const Bytes& haystack, const Bytes& secret, size_t width) {
  for (size_t i = 0; i + width <= secret.size(); ++i) {
    auto it = std::search(haystack.begin(), haystack.end(),
                          secret.begin() + i, secret.begin() + i + width);
    if (it != haystack.end()) return true;
  }
  return false;
}

TEST_F(KmsHttpTest, MasterKeyNeverLeaves) {
  const Bytes master =
      ToBytes(*ReadFileToString(dir_.path() / kMasterKeyFile));
  auto mk = abe::DecodeMasterKey(master);
  ASSERT_TRUE(mk.ok());
  std::vector<KmsClient::RawResponse> responses;
  auto record = [&](absl::StatusOr<KmsClient::RawResponse> r) {
    EXPECT_TRUE(r.ok()) << r.status();
    if (!r.ok()) return std::string();
    responses.push_back(*r);
    return r->body;
  };
  record(client_->Get("/params"));
  const std::string issued = record(client_->Post(
      "/keys", nlohmann::json{{"token", Mint("a@x.org", {{"role", "r"}})}}
                   .dump()));
  const std::string key = nlohmann::json::parse(issued).at("key");
  record(client_->Post("/keys", R"({"token":"bad.token"})"));
  record(client_->Post(
      "/keys/delegate",
      nlohmann::json{{"parent_key_proof", key}, {"subset", {"role:r"}}}.dump()));
  record(client_->Post("/keys/delegate", "{}"));
  record(client_->Post("/revoke", R"({"subject":"nobody@x.org"})"));
  now_ = kJuly;
  record(client_->Post("/rotate", "{}"));
  record(client_->Post("/revoke", R"({"subject":"a@x.org"})"));
  record(client_->Get("/nonexistent"));

  std::vector<Bytes> exposed;
  for (const auto& r : responses) {
    exposed.push_back(ToBytes(r.body));
    auto j = nlohmann::json::parse(r.body, nullptr, false);
    if (!j.is_discarded()) CollectExposed(j, exposed);
  }
  ASSERT_GT(exposed.size(), 20u);
  ASSERT_GE(mk->payload.size(), 16u);
  for (const Bytes& blob : exposed) {
    EXPECT_FALSE(ContainsWindow(blob, mk->payload, 16));
    EXPECT_FALSE(ContainsWindow(blob, ToBytes(HexEncode(mk->payload)), 32));
    EXPECT_FALSE(ContainsWindow(blob, ToBytes(Base64Encode(mk->payload)), 24));
  }
}

}  // namespace
}  // namespace petra::kms
