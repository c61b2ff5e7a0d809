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

#include "petra/common/error.h"

#include <array>
#include <utility>

#include "absl/strings/cord.h"

namespace petra {
namespace {

constexpr std::string_view kPayloadUrl = "type.petra.dev/error-code";

struct CodeInfo {
  ErrorCode code;
  std::string_view name;
  absl::StatusCode canonical;
};

constexpr std::array<CodeInfo, 26> kCodes = {{
    {ErrorCode::kMalformedDocument, "MALFORMED_DOCUMENT",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kUnsupportedFormat, "UNSUPPORTED_FORMAT",
     absl::StatusCode::kUnimplemented},
    {ErrorCode::kMissingIndex, "MISSING_INDEX",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kPolicySyntax, "POLICY_SYNTAX",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kEmptyGate, "EMPTY_GATE", absl::StatusCode::kInvalidArgument},
    {ErrorCode::kBadThreshold, "BAD_THRESHOLD",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kEmptyAttributeSet, "EMPTY_ATTRIBUTE_SET",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kDecapsulationFailure, "DECAPSULATION_FAILURE",
     absl::StatusCode::kPermissionDenied},
    {ErrorCode::kAuthenticationFailure, "AUTHENTICATION_FAILURE",
     absl::StatusCode::kUnauthenticated},
    {ErrorCode::kMissingPlainHash, "MISSING_PLAIN_HASH",
     absl::StatusCode::kFailedPrecondition},
    {ErrorCode::kAmbiguousPath, "AMBIGUOUS_PATH",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kNodeNotFound, "NODE_NOT_FOUND", absl::StatusCode::kNotFound},
    {ErrorCode::kSaltMissing, "SALT_MISSING",
     absl::StatusCode::kFailedPrecondition},
    {ErrorCode::kSamenessFailure, "SAMENESS_FAILURE",
     absl::StatusCode::kFailedPrecondition},
    {ErrorCode::kUntrustedSbom, "FAIL_UNTRUSTED_SBOM",
     absl::StatusCode::kUnauthenticated},
    {ErrorCode::kGeneratorProducerLied, "FAIL_GENERATOR_PRODUCER_LIED",
     absl::StatusCode::kDataLoss},
    {ErrorCode::kStateExists, "STATE_EXISTS",
     absl::StatusCode::kAlreadyExists},
    {ErrorCode::kExpiredToken, "EXPIRED_TOKEN",
     absl::StatusCode::kUnauthenticated},
    {ErrorCode::kMalformedSubject, "MALFORMED_SUBJECT",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kSignatureRejected, "SIGNATURE_REJECTED",
     absl::StatusCode::kPermissionDenied},
    {ErrorCode::kNotFound, "NOT_FOUND", absl::StatusCode::kNotFound},
    {ErrorCode::kMalformedKey, "MALFORMED_KEY",
     absl::StatusCode::kInvalidArgument},
    {ErrorCode::kPolicyNotFound, "POLICY_NOT_FOUND",
     absl::StatusCode::kNotFound},
    {ErrorCode::kUsage, "USAGE", absl::StatusCode::kInvalidArgument},
    {ErrorCode::kEquivocation, "EQUIVOCATION",
     absl::StatusCode::kAlreadyExists},
    {ErrorCode::kIo, "IO_ERROR", absl::StatusCode::kUnavailable},
}};

const CodeInfo& Info(ErrorCode code) {
  for (const CodeInfo& info : kCodes) {
    if (info.code == code) return info;
  }
  return kCodes.back();
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) { return Info(code).name; }

absl::Status Error(ErrorCode code, std::string_view message) {
  const CodeInfo& info = Info(code);
  std::string text = std::string(info.name) + ": " + std::string(message);
  absl::Status status(info.canonical, text);
  status.SetPayload(absl::string_view(kPayloadUrl.data(), kPayloadUrl.size()),
                    absl::Cord(std::string(info.name)));
  return status;
}

std::optional<ErrorCode> ParseErrorCodeName(std::string_view name) {
  for (const CodeInfo& info : kCodes) {
    if (info.name == name) return info.code;
  }
  return std::nullopt;
}

std::optional<ErrorCode> GetErrorCode(const absl::Status& status) {
  auto payload = status.GetPayload(
      absl::string_view(kPayloadUrl.data(), kPayloadUrl.size()));
  if (!payload.has_value()) return std::nullopt;
  return ParseErrorCodeName(std::string(*payload));
}

}  // namespace petra
