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

#include "petra/cli/cli.h"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gtest/gtest.h"
#include "petra/cli/bench.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/merkle/container.h"
#include "petra/sbom/tree.h"

namespace petra::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

std::string Testdata(const std::string& relative) {
  return std::string(PETRA_TESTDATA_DIR) + "/" + relative;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("petra-cli-" +
            std::string(
                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(Exec({"keys", "setup", "--state", Path("st"), "--scheme",
                    "insecure-test"})
                  .code,
              kExitOk);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  CliRun Exec(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = RunCli(args, out, err);
    return {code, out.str(), err.str()};
  }

  // Runs with the key-service material passed as global flags.
  CliRun Petra(std::vector<std::string> args) {
    std::vector<std::string> full = {
        "--params",   Path("st/params.bin"),   "--gen-pub",
        Path("st/generator.pk"), "--prod-pub", Path("st/producer.pk"),
        "--gen-key",  Path("st/generator.sk"), "--prod-key",
        Path("st/producer.sk"),  "--store",    Path("store")};
    full.insert(full.end(), args.begin(), args.end());
    return Exec(full);
  }

  std::string IssueKey(const std::string& attribute) {
    const std::string path = Path(attribute.substr(attribute.find(':') + 1) +
                                  ".key");
    EXPECT_EQ(Exec({"keys", "issue", "--state", Path("st"), "--attr",
                    attribute, "--out", path})
                  .code,
              kExitOk);
    return path;
  }

  // Redacts hello.spdx.json under the license policy into out/<name>.
  void RedactHello(const std::string& policy = "licenses.json",
                   const std::string& name = "hello") {
    CliRun run = Petra({"redact", "--sbom", Testdata("spdx/hello.spdx.json"),
                     "--policy", Testdata("policies/" + policy), "--out",
                     Path("out"), "--name", name, "--seed", "7"});
    ASSERT_EQ(run.code, kExitOk) << run.err;
  }

  std::string Container(const std::string& name = "hello") const {
    return Path("out/" + name + ".petra");
  }
  std::string Salts(const std::string& name = "hello") const {
    return Path("out/" + name + ".petra-salts");
  }

  static std::string ErrorName(const CliRun& run) {
    json j = json::parse(run.err, nullptr, false);
    return j.is_object() ? j.value("error", "") : "";
  }

  fs::path dir_;
};

TEST(CliConfigTest, ParsesKeysCommentsAndQuotes) {
  auto settings = ParseConfig(
      "# petra settings\n"
      "[petra]\n"
      "params = \"keys/params.bin\"\n"
      "store=store  # trailing comment\n"
      "\n");
  ASSERT_TRUE(settings.ok()) << settings.status();
  EXPECT_EQ(settings->at("params"), "keys/params.bin");
  EXPECT_EQ(settings->at("store"), "store");
  EXPECT_EQ(settings->size(), 2u);
}

TEST(CliConfigTest, RejectsLineWithoutEquals) {
  auto settings = ParseConfig("params\n");
  EXPECT_EQ(GetErrorCode(settings.status()), ErrorCode::kUsage);
}

TEST(CliExitCodeTest, MapsErrorCodes) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kUntrustedSbom, "x")), kExitUntrusted);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kGeneratorProducerLied, "x")),
            kExitLied);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kEquivocation, "x")), kExitSplitView);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kUsage, "x")), kExitUsage);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kPolicyNotFound, "x")), kExitError);
}

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(Exec({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Exec({}).code, kExitUsage);
}

TEST_F(CliTest, MissingPolicyFileIsPolicyNotFound) {
  CliRun run = Petra({"redact", "--sbom", Testdata("spdx/hello.spdx.json"),
                   "--policy", Path("absent.json"), "--out", Path("out")});
  EXPECT_EQ(run.code, kExitError);
  EXPECT_EQ(ErrorName(run), "POLICY_NOT_FOUND");
  EXPECT_FALSE(fs::exists(Container()));
}

TEST_F(CliTest, RedactThenVerifyAgainstPlaintext) {
  RedactHello();
  CliRun run = Petra({"verify", "--sbom", Container(), "--plaintext", Salts(),
                   "--field", "sbom.package.licenseConcluded"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  json report = json::parse(run.out);
  EXPECT_EQ(report["signatures"]["generator"], "valid");
  EXPECT_EQ(report["signatures"]["producer"], "valid");
  EXPECT_EQ(report["sameness"]["mismatch"], 0);
  EXPECT_EQ(report["sameness"]["unverifiable"], 0);
  EXPECT_EQ(report["membership"]["verified"], true);
}

TEST_F(CliTest, QueryWithCapableKeyReturnsLicense) {
  RedactHello();
  CliRun run = Petra({"query", "--sbom", Container(), "--key",
                   IssueKey("role:legal"), "--select",
                   "sbom.package.licenseConcluded"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  json report = json::parse(run.out);
  ASSERT_EQ(report["results"].size(), 1u);
  EXPECT_EQ(report["results"][0]["value"], "GPL-3.0-or-later");
  EXPECT_TRUE(report["placeholders"].empty());
}

TEST_F(CliTest, QueryWithIncapableKeyShowsPlaceholders) {
  RedactHello();
  CliRun run = Petra({"query", "--sbom", Container(), "--key",
                   IssueKey("role:marketing"), "--select",
                   "**.licenseConcluded"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  json report = json::parse(run.out);
  EXPECT_TRUE(report["results"].empty());
  EXPECT_FALSE(report["placeholders"].empty());
  EXPECT_EQ(run.out.find("GPL-3.0"), std::string::npos);
}

TEST_F(CliTest, QueryExportsSpdx) {
  RedactHello();
  CliRun run = Petra({"query", "--sbom", Container(), "--key",
                   IssueKey("role:legal"), "--select", "**.licenseConcluded",
                   "--format", "spdx"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  json doc = json::parse(run.out);
  EXPECT_EQ(doc["packages"][0]["licenseConcluded"], "GPL-3.0-or-later");
}

TEST_F(CliTest, TamperedSignatureIsUntrusted) {
  RedactHello();
  auto text = ReadFileToString(Container());
  ASSERT_TRUE(text.ok());
  json container = json::parse(*text);
  json& sigs = container["signatures"];
  ASSERT_TRUE(sigs.is_object());
  std::string generator = sigs["generator"].get<std::string>();
  generator[5] = generator[5] == 'A' ? 'B' : 'A';
  sigs["generator"] = generator;
  ASSERT_TRUE(
      WriteFileAtomic(Container(), AsBytes(container.dump()), false).ok());
  CliRun run = Petra({"verify", "--sbom", Container(), "--key",
                   IssueKey("role:legal")});
  EXPECT_EQ(run.code, kExitUntrusted);
  EXPECT_EQ(ErrorName(run), "FAIL_UNTRUSTED_SBOM");
}

TEST_F(CliTest, AlteredPlaintextIsLie) {
  RedactHello();
  auto text = ReadFileToString(Salts());
  ASSERT_TRUE(text.ok());
  auto bundle = merkle::ReadSaltFile(*text);
  ASSERT_TRUE(bundle.ok()) << bundle.status();
  // The producer-side copy claims a different license than was committed.
  sbom::Node* package = nullptr;
  for (sbom::Node& child : bundle->tree.root.children) {
    if (child.name == "package") package = &child;
  }
  ASSERT_NE(package, nullptr);
  bool replaced = false;
  for (sbom::Node& field : package->children) {
    if (field.name == "licenseConcluded") {
      field.value = "MIT";
      replaced = true;
    }
  }
  ASSERT_TRUE(replaced);
  ASSERT_TRUE(WriteFileAtomic(Salts(), AsBytes(merkle::WriteSaltFile(*bundle)),
                              true)
                  .ok());
  CliRun run = Petra({"verify", "--sbom", Container(), "--plaintext", Salts()});
  EXPECT_EQ(run.code, kExitLied);
  EXPECT_EQ(ErrorName(run), "FAIL_GENERATOR_PRODUCER_LIED");
  EXPECT_GT(json::parse(run.out)["sameness"]["mismatch"].get<int>(), 0);
}

TEST_F(CliTest, CountersignAfterUnsignedRedact) {
  CliRun run = Exec({"--params", Path("st/params.bin"), "--gen-key",
                  Path("st/generator.sk"), "redact", "--sbom",
                  Testdata("spdx/hello.spdx.json"), "--policy",
                  Testdata("policies/licenses.json"), "--out", Path("out"),
                  "--name", "hello"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  EXPECT_EQ(json::parse(run.out)["countersigned"], false);
  // A consumer refuses the uncountersigned container.
  EXPECT_EQ(Petra({"verify", "--sbom", Container()}).code, kExitUntrusted);
  run = Petra({"countersign", "--sbom", Container(), "--plaintext", Salts()});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  EXPECT_EQ(Petra({"verify", "--sbom", Container()}).code, kExitOk);
}

TEST_F(CliTest, EmbeddedSbomAppearsInInspect) {
  RedactHello();
  CliRun run = Petra({"redact", "--sbom",
                   Testdata("cyclonedx/two-components.cdx.json"), "--embed",
                   Container(), "--policy", Testdata("policies/licenses.json"),
                   "--out", Path("out"), "--name", "outer"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  run = Exec({"inspect", Container("outer")});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  json report = json::parse(run.out);
  ASSERT_EQ(report["nested_sboms"].size(), 1u);
  const json& nested = report["nested_sboms"][0];
  EXPECT_EQ(nested["link_verified"], true);
  // The nested root is the standalone container's root.
  CliRun inner = Exec({"inspect", Container()});
  EXPECT_EQ(nested["merkle_root"], json::parse(inner.out)["merkle_root"]);
}

TEST_F(CliTest, StorePublishFetchAndEquivocation) {
  RedactHello();
  CliRun run = Petra({"store", "publish", "--sbom", Container()});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  const std::string purl = json::parse(run.out)["purl"];

  run = Petra({"store", "fetch", "--purl", purl});
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_EQ(run.out, *ReadFileToString(Container()));

  RedactHello("all-public.json", "other");
  run = Petra({"store", "publish", "--sbom", Container("other")});
  EXPECT_EQ(run.code, kExitSplitView);
  EXPECT_EQ(ErrorName(run), "EQUIVOCATION");

  run = Petra({"store", "fetch", "--purl", "pkg:generic/absent@1"});
  EXPECT_EQ(run.code, kExitError);
  EXPECT_EQ(ErrorName(run), "NOT_FOUND");
}

TEST_F(CliTest, CompareDetectsSplitView) {
  RedactHello();
  RedactHello("all-public.json", "other");
  CliRun run = Exec({"compare", Container(), Container("other")});
  EXPECT_EQ(run.code, kExitSplitView);
  EXPECT_EQ(json::parse(run.out)["verdict"], "split-view");
  run = Exec({"compare", Container(), Container()});
  EXPECT_EQ(run.code, kExitOk);
  EXPECT_EQ(json::parse(run.out)["verdict"], "identical");
}

TEST_F(CliTest, BenchWritesCsvWithMeanRow) {
  ASSERT_EQ(Exec({"corpus", "--out", Path("corpus"), "--count", "2", "--max",
                  "4"})
                .code,
            kExitOk);
  CliRun run = Exec({"bench", "--corpus", Path("corpus"), "--policy",
                  Testdata("policies/intellectual-property.json"), "--scheme",
                  "insecure-test"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  std::istringstream lines(run.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], kBenchCsvHeader);
  EXPECT_TRUE(rows[3].starts_with("MEAN,"));
  EXPECT_EQ(json::parse(run.err)["files"], 2);
}

TEST_F(CliTest, BenchMissingPolicy) {
  CliRun run = Exec({"bench", "--corpus", Path("corpus"), "--policy",
                  Path("absent.json")});
  EXPECT_EQ(run.code, kExitError);
  EXPECT_EQ(ErrorName(run), "POLICY_NOT_FOUND");
}

TEST_F(CliTest, ConfigFileSuppliesPaths) {
  std::ofstream(Path("petra.toml"))
      << "params = st/params.bin\n"
         "generator_public_key = st/generator.pk\n"
         "producer_public_key = st/producer.pk\n"
         "generator_secret_key = st/generator.sk\n"
         "producer_secret_key = st/producer.sk\n";
  CliRun run = Exec({"--config", Path("petra.toml"), "redact", "--sbom",
                  Testdata("spdx/hello.spdx.json"), "--policy",
                  Testdata("policies/licenses.json"), "--out", Path("out")});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  run = Exec({"--config", Path("petra.toml"), "verify", "--sbom", Container()});
  EXPECT_EQ(run.code, kExitOk) << run.err;
}

}  // namespace
}  // namespace petra::cli
