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

// HTTP/JSON front end of the key service and a matching client.
//
//   GET  /params         {scheme, params, generator_public_key,
//                         producer_public_key, token_authority_public_key}
//   POST /keys           {token} -> grant
//   POST /keys/delegate  {parent_key_proof, subset} -> grant
//   POST /revoke         {subject} -> {revoked}
//   POST /rotate         {} -> {reissued, window}
//
// A grant is {subject, key, attributes, expiry, issued_at}. Binary values are
// base64. Failures return 4xx/5xx with {error: CODE, message}.

#ifndef PETRA_KMS_HTTP_H_
#define PETRA_KMS_HTTP_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "petra/kms/key_service.h"

namespace petra::kms {

using Clock = std::function<int64_t()>;  // unix seconds
int64_t SystemClock();

class KmsHttpServer {
 public:
  KmsHttpServer(KeyService& service, Clock clock = SystemClock);
  ~KmsHttpServer();
  KmsHttpServer(const KmsHttpServer&) = delete;
  KmsHttpServer& operator=(const KmsHttpServer&) = delete;

  // Binds `host:port`; port 0 picks a free port.
  absl::Status Bind(const std::string& host, int port);
  int port() const { return port_; }

  // Serves on the calling thread until Stop().
  void Serve();
  // Serves on a background thread.
  void Start();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
};

class KmsClient {
 public:
  // `base_url` such as "http://127.0.0.1:8700".
  explicit KmsClient(std::string base_url);

  absl::StatusOr<PublicMaterial> Params() const;
  absl::StatusOr<KeyGrant> IssueKey(std::string_view token) const;
  absl::StatusOr<KeyGrant> Delegate(const abe::AttributeSecretKey& parent,
                                    const policy::AttributeSet& subset) const;
  absl::Status Revoke(std::string_view subject) const;
  absl::StatusOr<size_t> Rotate() const;

  // Raw exchange, for tests that inspect response bodies.
  struct RawResponse {
    int status = 0;
    std::string body;
  };
  absl::StatusOr<RawResponse> Get(const std::string& path) const;
  absl::StatusOr<RawResponse> Post(const std::string& path,
                                   const std::string& body) const;

 private:
  std::string base_url_;
};

}  // namespace petra::kms

#endif  // PETRA_KMS_HTTP_H_
