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

// The `petra` command line. Errors are written to stderr as
// {"error": CODE, "message": ...}.

#ifndef PETRA_CLI_CLI_H_
#define PETRA_CLI_CLI_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace petra::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,           // any other failure; see the JSON error code
  kExitUsage = 2,
  kExitUntrusted = 3,       // FAIL_UNTRUSTED_SBOM
  kExitLied = 4,            // FAIL_GENERATOR_PRODUCER_LIED
  kExitSplitView = 5,       // EQUIVOCATION / compare found a split view
};

int ExitCodeFor(const absl::Status& status);

// `key = value` lines; '#' starts a comment; values may be double-quoted.
// Recognised keys: params, generator_public_key, producer_public_key,
// generator_secret_key, producer_secret_key, store, kms.
absl::StatusOr<std::map<std::string, std::string>> ParseConfig(
    std::string_view text);

// Runs one invocation; `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace petra::cli

#endif  // PETRA_CLI_CLI_H_
