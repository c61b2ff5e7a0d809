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

#include "petra/cli/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/merkle/container.h"
#include "petra/pipeline/pipeline.h"

namespace petra::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSyntheticPrefix = "synthetic:";

void CollectLeaves(const policy::AccessTree& tree,
                   policy::AttributeSet& out) {
  if (tree.is_leaf()) {
    out.insert(tree.attribute());
    return;
  }
  for (const policy::AccessTree& child : tree.children()) {
    CollectLeaves(child, out);
  }
}

double MsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

BenchRow BenchReport::Mean() const {
  BenchRow mean;
  mean.file = "MEAN";
  if (rows.empty()) return mean;
  const double n = static_cast<double>(rows.size());
  double plain = 0, redacted = 0;
  for (const BenchRow& r : rows) {
    plain += static_cast<double>(r.plain_bytes);
    redacted += static_cast<double>(r.redacted_bytes);
    mean.overhead_pct += r.overhead_pct / n;
    mean.tree_ms += r.tree_ms / n;
    mean.encrypt_ms += r.encrypt_ms / n;
    mean.merkle_ms += r.merkle_ms / n;
    mean.decrypt_ms += r.decrypt_ms / n;
  }
  mean.plain_bytes = static_cast<size_t>(std::llround(plain / n));
  mean.redacted_bytes = static_cast<size_t>(std::llround(redacted / n));
  return mean;
}

double BenchReport::MeanAbsEncryptDecryptGapMs() const {
  if (rows.empty()) return 0;
  double sum = 0;
  for (const BenchRow& r : rows) sum += std::abs(r.encrypt_ms - r.decrypt_ms);
  return sum / static_cast<double>(rows.size());
}

absl::StatusOr<BenchReport> RunBench(const BenchOptions& options) {
  std::optional<policy::RedactionPolicy> fixed_policy;
  std::optional<policy::SyntheticPolicy> synthetic;
  if (options.policy.starts_with(kSyntheticPrefix)) {
    PETRA_ASSIGN_OR_RETURN(
        synthetic, policy::ParseSyntheticPolicyName(
                       options.policy.substr(kSyntheticPrefix.size())));
  } else {
    auto text = ReadFileToString(options.policy);
    if (!text.ok()) {
      return Error(ErrorCode::kPolicyNotFound,
                   absl::StrCat("cannot read policy ", options.policy));
    }
    PETRA_ASSIGN_OR_RETURN(fixed_policy, policy::ParsePolicy(AsBytes(*text)));
  }

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(options.corpus, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    return Error(ErrorCode::kIo, absl::StrCat("cannot list corpus ",
                                              options.corpus.string()));
  }
  std::sort(files.begin(), files.end());

  DeterministicRandom rng(options.seed);
  PETRA_ASSIGN_OR_RETURN(auto setup, abe::AbeSetup(options.scheme, rng));
  const abe::PublicParams& pp = setup.first;
  const SigningKeyPair gen = SigningKeyPair::Generate(rng);
  const SigningKeyPair prod = SigningKeyPair::Generate(rng);
  const policy::RedactionPolicy all_public;
  const policy::YearMonth now = policy::YearMonth::Now();

  BenchReport report;
  for (const fs::path& path : files) {
    BenchRow row;
    row.file = path.filename().string();
    pipeline::PhaseTimings timings;

    auto text = ReadFileToString(path);
    if (!text.ok()) {
      ++report.skipped;
      continue;
    }
    const auto parse_start = std::chrono::steady_clock::now();
    auto format = sbom::DetectFormat(AsBytes(*text));
    absl::StatusOr<sbom::SbomTree> tree =
        format.ok() ? sbom::ParseSbom(AsBytes(*text), *format)
                    : absl::StatusOr<sbom::SbomTree>(format.status());
    timings.tree_ms += MsSince(parse_start);
    if (!tree.ok()) {
      ++report.skipped;
      continue;
    }
    const policy::RedactionPolicy policy =
        synthetic ? policy::SynthesizePolicy(*synthetic, tree->root)
                  : *fixed_policy;

    pipeline::RedactOptions baseline_options;
    baseline_options.rng = &rng;
    baseline_options.now = now;
    PETRA_ASSIGN_OR_RETURN(
        auto baseline,
        pipeline::Redact(std::span(&*tree, 1), all_public, pp, gen.secret_key,
                         baseline_options));
    PETRA_ASSIGN_OR_RETURN(
        baseline.redacted,
        pipeline::Countersign(baseline.redacted, baseline.plain,
                              prod.secret_key));

    pipeline::RedactOptions redact_options = baseline_options;
    redact_options.timings = &timings;
    PETRA_ASSIGN_OR_RETURN(
        auto redacted, pipeline::Redact(std::span(&*tree, 1), policy, pp,
                                        gen.secret_key, redact_options));
    PETRA_ASSIGN_OR_RETURN(
        redacted.redacted,
        pipeline::Countersign(redacted.redacted, redacted.plain,
                              prod.secret_key));

    row.plain_bytes = merkle::WriteContainer(baseline.redacted).size();
    row.redacted_bytes = merkle::WriteContainer(redacted.redacted).size();
    row.overhead_pct =
        100.0 *
        (static_cast<double>(row.redacted_bytes) -
         static_cast<double>(row.plain_bytes)) /
        static_cast<double>(row.plain_bytes);

    // A key holding every attribute the policy mentions opens every node.
    policy::AttributeSet attributes;
    for (const auto& assignment :
         policy::ResolvePolicy(policy, tree->root, now)) {
      if (assignment.has_value()) CollectLeaves(*assignment, attributes);
    }
    if (attributes.empty()) attributes.insert("bench:none");
    PETRA_ASSIGN_OR_RETURN(
        abe::AttributeSecretKey key,
        abe::AbeKeyGen(pp, setup.second, attributes, rng));
    pipeline::ConsumeOptions consume_options;
    consume_options.now = now;
    consume_options.timings = &timings;
    PETRA_ASSIGN_OR_RETURN(
        pipeline::DecryptedView view,
        pipeline::Consume(redacted.redacted, pp, key, gen.public_key,
                          prod.public_key, consume_options));
    if (view.placeholder_nodes != 0 || view.tree.root != tree->root) {
      return Error(ErrorCode::kGeneratorProducerLied,
                   absl::StrCat("round trip of ", row.file, " lost content"));
    }
    row.tree_ms = timings.tree_ms;
    row.encrypt_ms = timings.encrypt_ms;
    row.merkle_ms = timings.merkle_ms;
    row.decrypt_ms = timings.decrypt_ms;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void WriteBenchCsv(const BenchReport& report, std::ostream& out) {
  out << kBenchCsvHeader << "\n";
  auto line = [&out](const BenchRow& r) {
    out << absl::StrFormat("%s,%d,%d,%.2f,%.3f,%.3f,%.3f,%.3f\n", r.file,
                           r.plain_bytes, r.redacted_bytes, r.overhead_pct,
                           r.tree_ms, r.encrypt_ms, r.merkle_ms, r.decrypt_ms);
  };
  for (const BenchRow& r : report.rows) line(r);
  line(report.Mean());
}

}  // namespace petra::cli
