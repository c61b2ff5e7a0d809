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

#include "petra/kms/http.h"

#include <httplib.h>

#include <chrono>
#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "petra/common/error.h"

namespace petra::kms {
namespace {

using json = nlohmann::json;

constexpr char kJson[] = "application/json";

int HttpStatusFor(const absl::Status& status) {
  switch (GetErrorCode(status).value_or(ErrorCode::kIo)) {
    case ErrorCode::kAuthenticationFailure:
    case ErrorCode::kExpiredToken:
      return 401;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kIo:
      return 500;
    default:
      return 400;
  }
}

void Fail(httplib::Response& res, const absl::Status& status) {
  const auto code = GetErrorCode(status);
  res.status = HttpStatusFor(status);
  res.set_content(
      json{{"error", code ? ErrorCodeName(*code) : "INTERNAL"},
           {"message", std::string(status.message())}}
          .dump(),
      kJson);
}

json GrantToJson(const KeyGrant& grant) {
  return json{{"subject", grant.subject},
              {"key", Base64Encode(abe::EncodeSecretKey(grant.key))},
              {"attributes", grant.key.attributes},
              {"expiry", grant.expiry_window.ToString()},
              {"issued_at", grant.issued_at}};
}

absl::StatusOr<json> ParseBody(const std::string& body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Error(ErrorCode::kMalformedDocument, "request body is not a JSON "
                                                "object");
  }
  return j;
}

absl::StatusOr<std::string> StringField(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    return Error(ErrorCode::kMalformedDocument,
                 absl::StrCat("missing string field '", name, "'"));
  }
  return it->get<std::string>();
}

absl::StatusOr<Bytes> Base64Field(const json& j, const char* name) {
  PETRA_ASSIGN_OR_RETURN(std::string text, StringField(j, name));
  auto bytes = Base64Decode(text);
  if (!bytes.ok()) {
    return Error(ErrorCode::kMalformedDocument,
                 absl::StrCat("field '", name, "' is not base64"));
  }
  return *std::move(bytes);
}

// Wraps a handler that produces JSON or a status.
template <typename Fn>
httplib::Server::Handler Json(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    absl::StatusOr<json> out = fn(req);
    if (!out.ok()) {
      Fail(res, out.status());
      return;
    }
    res.set_content(out->dump(), kJson);
  };
}

}  // namespace

int64_t SystemClock() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct KmsHttpServer::Impl {
  httplib::Server server;
};

KmsHttpServer::KmsHttpServer(KeyService& service, Clock clock)
    : impl_(std::make_unique<Impl>()) {
  httplib::Server& s = impl_->server;
  s.Get("/params", Json([&service](const httplib::Request&)
                            -> absl::StatusOr<json> {
          const PublicMaterial& pub = service.public_material();
          return json{
              {"scheme", abe::SchemeName(pub.scheme)},
              {"params", Base64Encode(pub.params)},
              {"generator_public_key", Base64Encode(pub.generator_public_key)},
              {"producer_public_key", Base64Encode(pub.producer_public_key)},
              {"token_authority_public_key",
               Base64Encode(pub.token_authority_public_key)}};
        }));
  s.Post("/keys", Json([&service, clock](const httplib::Request& req)
                           -> absl::StatusOr<json> {
           PETRA_ASSIGN_OR_RETURN(json body, ParseBody(req.body));
           PETRA_ASSIGN_OR_RETURN(std::string token,
                                  StringField(body, "token"));
           PETRA_ASSIGN_OR_RETURN(KeyGrant grant,
                                  service.IssueKey(token, clock()));
           return GrantToJson(grant);
         }));
  s.Post("/keys/delegate",
         Json([&service, clock](const httplib::Request& req)
                  -> absl::StatusOr<json> {
           PETRA_ASSIGN_OR_RETURN(json body, ParseBody(req.body));
           PETRA_ASSIGN_OR_RETURN(Bytes parent,
                                  Base64Field(body, "parent_key_proof"));
           policy::AttributeSet subset;
           auto it = body.find("subset");
           if (it == body.end() || !it->is_array()) {
             return Error(ErrorCode::kMalformedDocument,
                          "missing array field 'subset'");
           }
           for (const json& a : *it) {
             if (!a.is_string()) {
               return Error(ErrorCode::kMalformedDocument,
                            "subset entries must be strings");
             }
             subset.insert(a.get<std::string>());
           }
           PETRA_ASSIGN_OR_RETURN(KeyGrant grant,
                                  service.Delegate(parent, subset, clock()));
           return GrantToJson(grant);
         }));
  s.Post("/revoke", Json([&service, clock](const httplib::Request& req)
                             -> absl::StatusOr<json> {
           PETRA_ASSIGN_OR_RETURN(json body, ParseBody(req.body));
           PETRA_ASSIGN_OR_RETURN(std::string subject,
                                  StringField(body, "subject"));
           PETRA_RETURN_IF_ERROR(service.Revoke(subject, clock()));
           return json{{"revoked", subject}};
         }));
  s.Post("/rotate", Json([&service, clock](const httplib::Request&)
                             -> absl::StatusOr<json> {
           const int64_t now = clock();
           PETRA_ASSIGN_OR_RETURN(size_t reissued, service.Rotate(now));
           return json{
               {"reissued", reissued},
               {"window", policy::YearMonth::FromUnixSeconds(now).ToString()}};
         }));
}

KmsHttpServer::~KmsHttpServer() { Stop(); }

absl::Status KmsHttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) port_ = 0;
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  }
  if (port_ == 0) {
    return Error(ErrorCode::kIo,
                 absl::StrCat("cannot bind ", host, ":", port));
  }
  return absl::OkStatus();
}

void KmsHttpServer::Serve() { impl_->server.listen_after_bind(); }

void KmsHttpServer::Start() {
  thread_ = std::thread([this] { Serve(); });
  impl_->server.wait_until_ready();
}

void KmsHttpServer::Stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

KmsClient::KmsClient(std::string base_url) : base_url_(std::move(base_url)) {}

namespace {

absl::StatusOr<KmsClient::RawResponse> ToRaw(const httplib::Result& result,
                                             const std::string& what) {
  if (!result) {
    return Error(ErrorCode::kIo,
                 absl::StrCat(what, ": ", httplib::to_string(result.error())));
  }
  return KmsClient::RawResponse{result->status, result->body};
}

// Converts an error response back into a status with the same code.
absl::StatusOr<json> Expect(absl::StatusOr<KmsClient::RawResponse> raw) {
  if (!raw.ok()) return raw.status();
  json j = json::parse(raw->body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Error(ErrorCode::kIo, absl::StrCat("HTTP ", raw->status,
                                              ": non-JSON response"));
  }
  if (raw->status != 200) {
    const std::string name = j.value("error", "");
    const std::string message = j.value("message", "");
    return Error(ParseErrorCodeName(name).value_or(ErrorCode::kIo), message);
  }
  return j;
}

absl::StatusOr<KeyGrant> GrantFromJson(const json& j) {
  try {
    KeyGrant grant;
    grant.subject = j.at("subject").get<std::string>();
    PETRA_ASSIGN_OR_RETURN(Bytes key,
                           Base64Decode(j.at("key").get<std::string>()));
    PETRA_ASSIGN_OR_RETURN(grant.key, abe::DecodeSecretKey(key));
    PETRA_ASSIGN_OR_RETURN(
        grant.expiry_window,
        policy::YearMonth::Parse(j.at("expiry").get<std::string>()));
    grant.issued_at = j.at("issued_at").get<int64_t>();
    return grant;
  } catch (const json::exception& ex) {
    return Error(ErrorCode::kIo, absl::StrCat("malformed grant: ", ex.what()));
  }
}

}  // namespace

absl::StatusOr<KmsClient::RawResponse> KmsClient::Get(
    const std::string& path) const {
  httplib::Client client(base_url_);
  return ToRaw(client.Get(path), "GET " + path);
}

absl::StatusOr<KmsClient::RawResponse> KmsClient::Post(
    const std::string& path, const std::string& body) const {
  httplib::Client client(base_url_);
  return ToRaw(client.Post(path, body, kJson), "POST " + path);
}

absl::StatusOr<PublicMaterial> KmsClient::Params() const {
  PETRA_ASSIGN_OR_RETURN(json j, Expect(Get("/params")));
  try {
    PublicMaterial pub;
    PETRA_ASSIGN_OR_RETURN(pub.scheme,
                           abe::ParseSchemeName(j.at("scheme").get<std::string>()));
    PETRA_ASSIGN_OR_RETURN(pub.params,
                           Base64Decode(j.at("params").get<std::string>()));
    PETRA_ASSIGN_OR_RETURN(
        pub.generator_public_key,
        Base64Decode(j.at("generator_public_key").get<std::string>()));
    PETRA_ASSIGN_OR_RETURN(
        pub.producer_public_key,
        Base64Decode(j.at("producer_public_key").get<std::string>()));
    PETRA_ASSIGN_OR_RETURN(
        pub.token_authority_public_key,
        Base64Decode(j.at("token_authority_public_key").get<std::string>()));
    return pub;
  } catch (const json::exception& ex) {
    return Error(ErrorCode::kIo, absl::StrCat("malformed params: ", ex.what()));
  }
}

absl::StatusOr<KeyGrant> KmsClient::IssueKey(std::string_view token) const {
  PETRA_ASSIGN_OR_RETURN(
      json j, Expect(Post("/keys", json{{"token", std::string(token)}}.dump())));
  return GrantFromJson(j);
}

absl::StatusOr<KeyGrant> KmsClient::Delegate(
    const abe::AttributeSecretKey& parent,
    const policy::AttributeSet& subset) const {
  const json body = {
      {"parent_key_proof", Base64Encode(abe::EncodeSecretKey(parent))},
      {"subset", subset}};
  PETRA_ASSIGN_OR_RETURN(json j, Expect(Post("/keys/delegate", body.dump())));
  return GrantFromJson(j);
}

absl::Status KmsClient::Revoke(std::string_view subject) const {
  return Expect(Post("/revoke", json{{"subject", std::string(subject)}}.dump()))
      .status();
}

absl::StatusOr<size_t> KmsClient::Rotate() const {
  PETRA_ASSIGN_OR_RETURN(json j, Expect(Post("/rotate", "{}")));
  return j.value("reissued", size_t{0});
}

}  // namespace petra::kms
