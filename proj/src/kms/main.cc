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

// petra-kms: key-service daemon. State lives in $PETRA_KMS_STATE (or
// --state).
//
//   petra-kms setup [--scheme bsw|insecure-test] [--claim role]...
//   petra-kms serve --listen 127.0.0.1:8700
//   petra-kms mint-token --subject foo@bar.com [--claim role=auditor]...
//
// mint-token signs with the test token authority created by setup; it stands
// in for an external identity provider.

#include <CLI11.hpp>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <iostream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_split.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/kms/http.h"
#include "petra/kms/key_service.h"

namespace {

int Report(const absl::Status& status) {
  const auto code = petra::GetErrorCode(status);
  nlohmann::json error = {
      {"error", code ? petra::ErrorCodeName(*code) : "INTERNAL"},
      {"message", std::string(status.message())}};
  std::cerr << error.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Petra key-management service"};
  app.require_subcommand(1);
  std::string state;
  if (const char* env = std::getenv("PETRA_KMS_STATE")) state = env;
  app.add_option("--state", state, "State directory (default $PETRA_KMS_STATE)");

  auto* setup = app.add_subcommand("setup", "Create CP-ABE and signing keys");
  std::string scheme = "bsw";
  std::vector<std::string> claims;
  setup->add_option("--scheme", scheme, "bsw | insecure-test");
  setup->add_option("--claim", claims, "Token claim passed through as attribute");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string listen = "127.0.0.1:8700";
  serve->add_option("--listen", listen, "host:port");

  auto* mint = app.add_subcommand("mint-token", "Sign a test identity token");
  std::string subject;
  std::vector<std::string> token_claims;
  int64_t lifetime = 3600;
  mint->add_option("--subject", subject)->required();
  mint->add_option("--claim", token_claims, "name=value");
  mint->add_option("--lifetime", lifetime, "Seconds");

  CLI11_PARSE(app, argc, argv);
  if (state.empty()) {
    return Report(petra::Error(petra::ErrorCode::kUsage,
                               "set PETRA_KMS_STATE or pass --state"));
  }

  if (*setup) {
    petra::kms::SetupOptions options;
    auto id = petra::abe::ParseSchemeName(scheme);
    if (!id.ok()) return Report(id.status());
    options.scheme = *id;
    options.claim_mapping.insert(claims.begin(), claims.end());
    absl::Status status = petra::kms::KmsSetup(state, options);
    if (!status.ok()) return Report(status);
    std::cout << "key-service state created in " << state << "\n";
    return 0;
  }

  if (*mint) {
    auto sk = petra::ReadFileToString(std::filesystem::path(state) /
                                      petra::kms::kAuthoritySecretFile);
    if (!sk.ok()) return Report(sk.status());
    petra::kms::IdentityToken token;
    token.subject = subject;
    for (const std::string& claim : token_claims) {
      std::pair<std::string, std::string> kv = absl::StrSplit(claim, '=');
      token.extra_claims[kv.first] = kv.second;
    }
    token.not_before = petra::kms::SystemClock() - 60;
    token.not_after = token.not_before + 60 + lifetime;
    std::cout << petra::kms::MintToken(token, petra::AsBytes(*sk)) << "\n";
    return 0;
  }

  auto service = petra::kms::KeyService::Open(state);
  if (!service.ok()) return Report(service.status());
  const size_t colon = listen.rfind(':');
  int port = 0;
  if (colon == std::string::npos ||
      !absl::SimpleAtoi(listen.substr(colon + 1), &port)) {
    return Report(petra::Error(petra::ErrorCode::kUsage,
                               "--listen expects host:port"));
  }
  petra::kms::KmsHttpServer server(**service);
  absl::Status bound = server.Bind(listen.substr(0, colon), port);
  if (!bound.ok()) return Report(bound);
  std::cout << "listening on " << listen.substr(0, colon) << ":"
            << server.port() << std::endl;
  server.Serve();
  return 0;
}
