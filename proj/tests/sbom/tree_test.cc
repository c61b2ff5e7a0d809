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

#include "petra/sbom/tree.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "petra/common/error.h"
#include "petra/sbom/purl.h"
#include "petra/sbom/synthetic.h"

namespace petra::sbom {
namespace {

std::string ReadFixture(const std::string& relative) {
  std::ifstream in(std::string(PETRA_TESTDATA_DIR) + "/" + relative,
                   std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SbomTree MustParse(const std::string& doc, SourceFormat format) {
  auto tree = ParseSbom(AsBytes(doc), format);
  EXPECT_TRUE(tree.ok()) << tree.status();
  return tree.ok() ? *tree : SbomTree{};
}

// Independent oracle: every scalar in the JSON document, rendered the way a
// field value would hold it.
void CollectScalars(const nlohmann::json& v, std::vector<std::string>& out) {
  if (v.is_object()) {
    for (const auto& [k, inner] : v.items()) CollectScalars(inner, out);
  } else if (v.is_array()) {
    for (const auto& inner : v) CollectScalars(inner, out);
  } else {
    out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
}

std::vector<std::string> SortedDocumentScalars(const std::string& doc) {
  std::vector<std::string> out;
  CollectScalars(nlohmann::json::parse(doc), out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> SortedFieldValues(const SbomTree& tree) {
  std::vector<std::string> out;
  ForEachNode(tree.root, [&](const NodeRef& ref) {
    const Node& n = *ref.node;
    // Empty-array markers carry no document scalar.
    if (n.is_field() && !n.name.ends_with("[]") && !n.name.ends_with("/")) {
      out.push_back(n.value);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

size_t CountKind(const Node& root, NodeKind kind, std::string_view name = "") {
  size_t n = 0;
  ForEachNode(root, [&](const NodeRef& ref) {
    if (ref.node->kind == kind && (name.empty() || ref.node->name == name)) ++n;
  });
  return n;
}

TEST(ParseSbomTest, HelloSpdxDecomposesIntoPackageFilesAndRelationships) {
  SbomTree tree =
      MustParse(ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx);
  EXPECT_EQ(tree.format, SourceFormat::kSpdx);
  EXPECT_TRUE(tree.root.is_sbom());
  EXPECT_EQ(tree.root.name,
            "pkg:github/swinslow/spdx-examples@1.0.0#example1/content");
  EXPECT_EQ(tree.root.value, "SPDX");

  size_t packages = 0, files = 0, relationships = 0, root_fields = 0;
  for (const Node& child : tree.root.children) {
    if (child.is_complex() && child.name == "package") ++packages;
    if (child.is_complex() && child.name == "file") ++files;
    if (child.is_complex() && child.name == "relationship") ++relationships;
    if (child.is_field()) ++root_fields;
  }
  EXPECT_EQ(packages, 1u);
  EXPECT_EQ(files, 3u);
  EXPECT_EQ(relationships, 4u);
  // spdxVersion, dataLicense, SPDXID, name, documentNamespace, 5 creationInfo
  // entries (created, 3 creators, licenseListVersion), documentDescribes[0].
  EXPECT_EQ(root_fields, 11u);

  // Every file carries its checksums.
  for (const Node& child : tree.root.children) {
    if (child.name != "file") continue;
    size_t checksum_fields = 0;
    for (const Node& c : child.children) {
      if (c.name == "checksum") checksum_fields += c.children.size();
    }
    EXPECT_EQ(checksum_fields, 6u);
  }
  // The binary is generated from the sources.
  size_t generated_from = 0;
  for (const Node& child : tree.root.children) {
    if (child.name != "relationship") continue;
    ASSERT_EQ(child.children.size(), 3u);
    if (child.children[1].value == "GENERATED_FROM") {
      EXPECT_EQ(child.children[0].value, "SPDXRef-hello-binary");
      ++generated_from;
    }
  }
  EXPECT_EQ(generated_from, 2u);
}

TEST(ParseSbomTest, LosslessOnFixturesAndSyntheticDocuments) {
  std::vector<std::pair<std::string, SourceFormat>> docs = {
      {ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx},
      {ReadFixture("spdx/empty.spdx.json"), SourceFormat::kSpdx},
      {ReadFixture("cyclonedx/two-components.cdx.json"),
       SourceFormat::kCycloneDx},
      {SyntheticSpdx(12, 1), SourceFormat::kSpdx},
      {SyntheticCycloneDx(40, 2), SourceFormat::kCycloneDx},
  };
  for (const auto& [doc, format] : docs) {
    SbomTree tree = MustParse(doc, format);
    EXPECT_EQ(SortedFieldValues(tree), SortedDocumentScalars(doc));
  }
}

TEST(ParseSbomTest, EmptySpdxHasOnlyMetadataFields) {
  SbomTree tree =
      MustParse(ReadFixture("spdx/empty.spdx.json"), SourceFormat::kSpdx);
  EXPECT_EQ(CountKind(tree.root, NodeKind::kComplex), 0u);
  for (const Node& child : tree.root.children) EXPECT_TRUE(child.is_field());
  EXPECT_EQ(tree.root.name,
            "pkg:generic/https%3A%2F%2Fexample.com%2Fspdx%2Fempty-1@0");
}

TEST(ParseSbomTest, TwoComponentCycloneDxNodeCount) {
  const std::string doc = ReadFixture("cyclonedx/two-components.cdx.json");
  SbomTree tree = MustParse(doc, SourceFormat::kCycloneDx);
  // Hand enumeration over the fixture: two component objects, each with
  // name/version/license; bomFormat, specVersion and serialNumber at the root.
  EXPECT_EQ(CountKind(tree.root, NodeKind::kComplex, "component"), 2u);
  size_t component_fields = 0;
  for (const Node& child : tree.root.children) {
    if (child.name == "component") component_fields += child.children.size();
  }
  EXPECT_EQ(component_fields, 6u);
  EXPECT_EQ(CountKind(tree.root, NodeKind::kField), 9u);
}

TEST(ParseSbomTest, RejectsMalformedAndUnsupportedInput) {
  EXPECT_TRUE(HasErrorCode(ParseSbom(AsBytes("{not json"), SourceFormat::kSpdx),
                           ErrorCode::kMalformedDocument));
  EXPECT_TRUE(HasErrorCode(ParseSbom(AsBytes("[]"), SourceFormat::kSpdx),
                           ErrorCode::kMalformedDocument));
  EXPECT_TRUE(HasErrorCode(
      ParseSbom(AsBytes(R"({"bomFormat":"CycloneDX"})"), SourceFormat::kSpdx),
      ErrorCode::kMalformedDocument));
  EXPECT_TRUE(HasErrorCode(
      ParseSbom(AsBytes(R"({"spdxVersion":"SPDX-3.0","name":"x"})"),
                SourceFormat::kSpdx),
      ErrorCode::kUnsupportedFormat));
  EXPECT_TRUE(HasErrorCode(
      ParseSbom(AsBytes(R"({"spdxVersion":"SPDX-2.3"})"), SourceFormat::kSpdx),
      ErrorCode::kMissingIndex));
  EXPECT_TRUE(HasErrorCode(
      ParseSbom(AsBytes(R"({"spdxVersion":"SPDX-2.3","name":"x","a":[[1]]})"),
                SourceFormat::kSpdx),
      ErrorCode::kMalformedDocument));
  EXPECT_TRUE(HasErrorCode(ParseFormatName("swid"), ErrorCode::kUnsupportedFormat));
}

TEST(DetectFormatTest, RecognizesAllFormats) {
  EXPECT_EQ(*DetectFormat(AsBytes(ReadFixture("spdx/hello.spdx.json"))),
            SourceFormat::kSpdx);
  EXPECT_EQ(
      *DetectFormat(AsBytes(ReadFixture("cyclonedx/two-components.cdx.json"))),
      SourceFormat::kCycloneDx);
  SbomTree tree =
      MustParse(ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx);
  EXPECT_EQ(*DetectFormat(SerializeTree(tree)), SourceFormat::kNative);
  EXPECT_FALSE(DetectFormat(AsBytes(R"({"x":1})")).ok());
}

TEST(SerializeTreeTest, RoundTripDeterminismAndInjectivity) {
  SbomTree tree =
      MustParse(ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx);
  Bytes a = SerializeTree(tree);
  EXPECT_EQ(a, SerializeTree(tree));
  auto back = ParseNative(a);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, tree);
  EXPECT_EQ(SerializeTree(*back), a);

  SbomTree changed = tree;
  changed.root.children[3].value += "x";
  EXPECT_NE(SerializeTree(changed), a);

  Bytes truncated(a.begin(), a.end() - 1);
  EXPECT_FALSE(ParseNative(truncated).ok());
}

TEST(SerializeTreeTest, LayoutMatchesHandEncoding) {
  SbomTree tree{Node::Sbom("pkg:generic/a@1", "m",
                           {Node::Complex("c", {Node::Field("n", "v")})}),
                SourceFormat::kNative};
  const Bytes expected = {
      'P', 'T', 'R', 'E', 1, 3,                      // header
      3, 0, 0, 0, 15, 'p', 'k', 'g', ':', 'g', 'e', 'n', 'e', 'r', 'i', 'c',
      '/', 'a', '@', '1', 0, 0, 0, 1, 'm', 0, 0, 0, 1,  // sbom
      2, 0, 0, 0, 1, 'c', 0, 0, 0, 1,                // complex
      1, 0, 0, 0, 1, 'n', 0, 0, 0, 1, 'v', 0, 0, 0, 0,  // field
  };
  EXPECT_EQ(SerializeTree(tree), expected);
}

TEST(ExportPlaintextTest, RoundTripsFixturesIgnoringKeyOrder) {
  std::vector<std::pair<std::string, SourceFormat>> docs = {
      {ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx},
      {ReadFixture("spdx/empty.spdx.json"), SourceFormat::kSpdx},
      {ReadFixture("cyclonedx/two-components.cdx.json"),
       SourceFormat::kCycloneDx},
      {SyntheticSpdx(5, 3), SourceFormat::kSpdx},
      {SyntheticCycloneDx(30, 4), SourceFormat::kCycloneDx},
  };
  for (const auto& [doc, format] : docs) {
    SbomTree tree = MustParse(doc, format);
    auto exported = ExportPlaintext(tree, format);
    ASSERT_TRUE(exported.ok()) << exported.status();
    EXPECT_EQ(nlohmann::json::parse(*exported), nlohmann::json::parse(doc));
    // Native trip first.
    auto native = ParseNative(SerializeTree(tree));
    ASSERT_TRUE(native.ok());
    EXPECT_EQ(nlohmann::json::parse(*ExportPlaintext(*native, format)),
              nlohmann::json::parse(doc));
  }
}

TEST(ExportPlaintextTest, PlaceholdersAndExtensions) {
  SbomTree tree{
      Node::Sbom("pkg:generic/demo@1", "SPDX",
                 {Node::Field("spdxVersion", "SPDX-2.3"),
                  Node::Complex("package", {Node::Field("name", "a"),
                                            Node::Placeholder("aa", "bb")}),
                  Node::Placeholder("cc", "dd"),
                  Node::Field("vendorNote", "internal")}),
      SourceFormat::kNative};
  auto exported = ExportPlaintext(tree, SourceFormat::kSpdx);
  ASSERT_TRUE(exported.ok()) << exported.status();
  const nlohmann::json expected = nlohmann::json::parse(R"({
    "spdxVersion": "SPDX-2.3",
    "packages": [
      {"name": "a", "petra:redacted": [{"policy": "aa", "hash": "bb"}]}
    ],
    "petra:redacted": [{"policy": "cc", "hash": "dd"}],
    "x-petra-extensions": {"fields": {"vendorNote": "internal"}}
  })");
  EXPECT_EQ(nlohmann::json::parse(*exported), expected);

  SbomTree cdx = MustParse(ReadFixture("cyclonedx/two-components.cdx.json"),
                           SourceFormat::kCycloneDx);
  EXPECT_TRUE(HasErrorCode(ExportPlaintext(cdx, SourceFormat::kSpdx),
                           ErrorCode::kUnsupportedFormat));
}

TEST(ValidateTreeTest, EnforcesStructuralInvariants) {
  SbomTree ok{Node::Sbom("pkg:generic/a@1", "", {Node::Field("n", "v")}),
              SourceFormat::kNative};
  EXPECT_TRUE(ValidateTree(ok).ok());
  SbomTree bad_index = ok;
  bad_index.root.name = "not-a-purl";
  EXPECT_TRUE(HasErrorCode(ValidateTree(bad_index), ErrorCode::kMissingIndex));
  SbomTree empty_name = ok;
  empty_name.root.children[0].name = "";
  EXPECT_FALSE(ValidateTree(empty_name).ok());
  SbomTree field_root{Node::Field("a", "b"), SourceFormat::kNative};
  EXPECT_FALSE(ValidateTree(field_root).ok());
}

TEST(TreeCompositionTest, EmbeddingARootUnderAComplexNodeStaysValid) {
  SbomTree parent =
      MustParse(ReadFixture("spdx/hello.spdx.json"), SourceFormat::kSpdx);
  SbomTree child = MustParse(ReadFixture("cyclonedx/two-components.cdx.json"),
                             SourceFormat::kCycloneDx);
  parent.root.children.push_back(Node::Complex("embedded-sbom", {child.root}));
  EXPECT_TRUE(ValidateTree(parent).ok());
  auto back = ParseNative(SerializeTree(parent));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, parent);
}

TEST(FieldPairsTest, PathsFollowSegments) {
  SbomTree tree{Node::Sbom("pkg:generic/a@1", "",
                           {Node::Complex("package", {Node::Field("version", "1")})}),
                SourceFormat::kNative};
  auto pairs = FieldPairs(tree.root);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].first, "sbom.package.version");
  EXPECT_EQ(pairs[0].second, "1");
}

TEST(PurlTest, ParsesAndValidates) {
  auto p = ParsePurl("pkg:npm/%40angular/core@16.0.0?arch=x86#src/lib");
  ASSERT_TRUE(p.ok()) << p.status();
  EXPECT_EQ(p->type, "npm");
  EXPECT_EQ(p->name_space, "%40angular");
  EXPECT_EQ(p->name, "core");
  EXPECT_EQ(p->version, "16.0.0");
  EXPECT_EQ(p->qualifiers, "arch=x86");
  EXPECT_EQ(p->subpath, "src/lib");
  EXPECT_EQ(p->ToString(), "pkg:npm/%40angular/core@16.0.0?arch=x86#src/lib");
  EXPECT_TRUE(IsValidPurl("pkg:generic/hello@0"));
  EXPECT_TRUE(IsValidPurl("pkg:maven/org.apache/commons-io"));
  EXPECT_FALSE(IsValidPurl("npm/foo@1"));
  EXPECT_FALSE(IsValidPurl("pkg:npm"));
  EXPECT_FALSE(IsValidPurl("pkg:1npm/foo"));
  EXPECT_FALSE(IsValidPurl("pkg:npm/fo o"));
  EXPECT_FALSE(IsValidPurl("pkg:npm/foo%2"));
  EXPECT_EQ(GenericPurl("https://x.org/a b", ""),
            "pkg:generic/https%3A%2F%2Fx.org%2Fa%20b@0");
}

}  // namespace
}  // namespace petra::sbom
