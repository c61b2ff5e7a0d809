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

#ifndef PETRA_COMMON_ERROR_H_
#define PETRA_COMMON_ERROR_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace petra {

// Domain error vocabulary. Every failing absl::Status produced by this
// library carries one of these codes as a payload, so callers (and the CLI's
// machine-readable error output) can branch on the exact condition.
enum class ErrorCode {
  kMalformedDocument,
  kUnsupportedFormat,
  kMissingIndex,
  kPolicySyntax,
  kEmptyGate,
  kBadThreshold,
  kEmptyAttributeSet,
  kDecapsulationFailure,
  kAuthenticationFailure,
  kMissingPlainHash,
  kAmbiguousPath,
  kNodeNotFound,
  kSaltMissing,
  kSamenessFailure,
  kUntrustedSbom,           // FAIL_UNTRUSTED_SBOM
  kGeneratorProducerLied,   // FAIL_GENERATOR_PRODUCER_LIED
  kStateExists,
  kExpiredToken,
  kMalformedSubject,
  kSignatureRejected,
  kNotFound,
  kMalformedKey,
  kPolicyNotFound,
  kUsage,
  kEquivocation,  // one index, two different merkle roots
  kIo,
};

// Stable identifier, e.g. "MALFORMED_DOCUMENT" or "FAIL_UNTRUSTED_SBOM".
std::string_view ErrorCodeName(ErrorCode code);
std::optional<ErrorCode> ParseErrorCodeName(std::string_view name);

absl::Status Error(ErrorCode code, std::string_view message);

// Returns the domain code attached to `status`, if any.
std::optional<ErrorCode> GetErrorCode(const absl::Status& status);

inline bool HasErrorCode(const absl::Status& status, ErrorCode code) {
  return GetErrorCode(status) == code;
}

template <typename T>
bool HasErrorCode(const absl::StatusOr<T>& status_or, ErrorCode code) {
  return GetErrorCode(status_or.status()) == code;
}

}  // namespace petra

#define PETRA_STATUS_CONCAT_INNER_(a, b) a##b
#define PETRA_STATUS_CONCAT_(a, b) PETRA_STATUS_CONCAT_INNER_(a, b)

#define PETRA_RETURN_IF_ERROR(expr)            \
  do {                                         \
    ::absl::Status petra_status_ = (expr);     \
    if (!petra_status_.ok()) return petra_status_; \
  } while (0)

#define PETRA_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(*tmp)

#define PETRA_ASSIGN_OR_RETURN(lhs, expr) \
  PETRA_ASSIGN_OR_RETURN_IMPL_(           \
      PETRA_STATUS_CONCAT_(petra_statusor_, __LINE__), lhs, expr)

#endif  // PETRA_COMMON_ERROR_H_
