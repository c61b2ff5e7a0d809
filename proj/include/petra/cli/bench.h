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

// Storage and timing measurements over a corpus of SBOM documents.
//
// plain_bytes is the size of the same SBOM's container under an all-public
// policy, so the overhead isolates what redaction adds over an unencrypted
// Petra tree.

#ifndef PETRA_CLI_BENCH_H_
#define PETRA_CLI_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "petra/abe/abkem.h"
#include "petra/policy/redaction_policy.h"

namespace petra::cli {

inline constexpr char kBenchCsvHeader[] =
    "file,plain_bytes,redacted_bytes,overhead_pct,tree_ms,encrypt_ms,"
    "merkle_ms,decrypt_ms";

struct BenchRow {
  std::string file;
  size_t plain_bytes = 0;
  size_t redacted_bytes = 0;
  double overhead_pct = 0;  // (redacted - plain) / plain * 100
  double tree_ms = 0;
  double encrypt_ms = 0;
  double merkle_ms = 0;
  double decrypt_ms = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  size_t skipped = 0;

  // Column-wise means, with file "MEAN".
  BenchRow Mean() const;
  // Mean of |encrypt_ms - decrypt_ms|.
  double MeanAbsEncryptDecryptGapMs() const;
};

struct BenchOptions {
  std::filesystem::path corpus;
  // A policy file, or "synthetic:complicated" / "synthetic:simplistic".
  std::string policy;
  abe::SchemeId scheme = abe::SchemeId::kBswTypeA;
  uint64_t seed = 2026;
};

// Redacts, countersigns and fully decrypts every file in the corpus. Files
// that do not parse are counted in `skipped`.
absl::StatusOr<BenchReport> RunBench(const BenchOptions& options);

void WriteBenchCsv(const BenchReport& report, std::ostream& out);

}  // namespace petra::cli

#endif  // PETRA_CLI_BENCH_H_
