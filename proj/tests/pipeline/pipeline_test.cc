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

#include "petra/pipeline/pipeline.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "petra/common/error.h"
#include "petra/merkle/container.h"
#include "petra/sbom/synthetic.h"
#include "support/fixtures.h"

namespace petra::pipeline {
namespace {

using merkle::Marker;
using merkle::NodeCheck;
using merkle::RedactedSbom;
using sbom::Node;
using sbom::SbomTree;
using testing::Authority;
using testing::MustParsePolicy;

using PairMultiset = std::multiset<std::pair<std::string, std::string>>;

SbomTree Parse(std::string_view document) {
  auto format = sbom::DetectFormat(AsBytes(document));
  EXPECT_TRUE(format.ok()) << format.status();
  auto tree = sbom::ParseSbom(AsBytes(document), *format);
  EXPECT_TRUE(tree.ok()) << tree.status();
  return *std::move(tree);
}

PairMultiset Pairs(const Node& root) {
  auto pairs = sbom::FieldPairs(root);
  return PairMultiset(pairs.begin(), pairs.end());
}

SbomTree Hello() {
  return Parse(testing::ReadTestdata("spdx/hello.spdx.json"));
}

class PipelineTest : public ::testing::Test {
 protected:
  PipelineTest()
      : authority_(Authority::Create(abe::SchemeId::kInsecureTest, 21)),
        rng_(99) {
    options_.rng = &rng_;
  }

  RedactionResult MustRedact(std::vector<SbomTree> inputs,
                             std::string_view policy_json) {
    auto result = Redact(inputs, MustParsePolicy(policy_json), authority_.pp,
                         authority_.gen.secret_key, options_);
    EXPECT_TRUE(result.ok()) << result.status();
    return *std::move(result);
  }

  RedactedSbom MustCountersign(const RedactionResult& r) {
    auto signed_sbom =
        Countersign(r.redacted, r.plain, authority_.prod.secret_key);
    EXPECT_TRUE(signed_sbom.ok()) << signed_sbom.status();
    return *std::move(signed_sbom);
  }

  absl::StatusOr<DecryptedView> Open(const RedactedSbom& sbom,
                                     const policy::AttributeSet& attrs,
                                     ConsumeOptions options = {}) {
    return Consume(sbom, authority_.pp, authority_.Key(attrs),
                   authority_.gen.public_key, authority_.prod.public_key,
                   options);
  }

  Authority authority_;
  DeterministicRandom rng_;
  RedactOptions options_;
};

size_t CountMarker(const merkle::RedactedNode& root, Marker marker) {
  size_t n = 0;
  merkle::ForEachRedacted(root, [&](const merkle::RedactedRef& ref) {
    if (ref.node->marker == marker) ++n;
  });
  return n;
}

TEST_F(PipelineTest, AllPublicPolicyHasNoKeyslots) {
  auto r = MustRedact({Hello()}, R"({"rules":[],"default":"public"})");
  EXPECT_TRUE(r.redacted.root.keyslots.empty());
  EXPECT_EQ(CountMarker(r.redacted.root, Marker::kRedacted), 0u);
  EXPECT_EQ(CountMarker(r.redacted.root, Marker::kPublic),
            sbom::CountNodes(Hello().root));
}

TEST_F(PipelineTest, LicenseRuleMarksExactlyTheLicenseFields) {
  auto r = MustRedact(
      {Hello()},
      R"({"rules":[{"paths":["**.licenseConcluded"],"access":"role:legal"}]})");
  // One package and three files each carry one licenseConcluded.
  EXPECT_EQ(CountMarker(r.redacted.root, Marker::kRedacted), 4u);
  EXPECT_EQ(r.redacted.root.keyslots.size(), 1u);
  const Node plain = Hello().root;
  std::vector<sbom::NodeId> license_ids;
  sbom::ForEachNode(plain, [&](const sbom::NodeRef& ref) {
    if (ref.node->is_field() && ref.node->name == "licenseConcluded") {
      license_ids.push_back(ref.id);
    }
  });
  std::vector<sbom::NodeId> redacted_ids;
  merkle::ForEachRedacted(r.redacted.root, [&](const merkle::RedactedRef& ref) {
    if (ref.node->marker == Marker::kRedacted) redacted_ids.push_back(ref.id);
  });
  EXPECT_EQ(redacted_ids, license_ids);
}

TEST_F(PipelineTest, FullAccessRoundTripIsIdentity) {
  std::vector<SbomTree> inputs = {Hello()};
  for (int i = 0; i < 3; ++i) {
    inputs.push_back(Parse(i % 2 == 0 ? sbom::SyntheticSpdx(2 + 12 * i, 500 + i)
                   : sbom::SyntheticCycloneDx(2 + 12 * i, 500 + i)));
  }
  for (const SbomTree& input : inputs) {
    auto r = MustRedact({input},
                        R"({"rules":[{"paths":["**"],"access":"role:all"}]})");
    auto view = Open(MustCountersign(r), {"role:all"});
    ASSERT_TRUE(view.ok()) << view.status();
    EXPECT_EQ(view->placeholder_nodes, 0u);
    EXPECT_EQ(view->tree.root, input.root);
    EXPECT_EQ(view->tree.format, input.format);
    EXPECT_EQ(Pairs(view->tree.root), Pairs(input.root));
  }
}

TEST_F(PipelineTest, NoAccessLeavesOnlyPlaceholders) {
  const SbomTree input = testing::TenNodeTree();
  auto r = MustRedact({input},
                      R"({"rules":[{"paths":["**"],"access":"role:all"}]})");
  const RedactedSbom sbom = MustCountersign(r);
  auto view = Open(sbom, {"role:other"});
  ASSERT_TRUE(view.ok()) << view.status();
  EXPECT_EQ(view->decrypted_nodes, 0u);
  EXPECT_EQ(view->placeholder_nodes, 10u);
  EXPECT_TRUE(view->salts.empty());
  // Nothing of the plaintext leaks into the view or the container.
  const std::string rendered =
      ToString(sbom::SerializeTree(view->tree)) + merkle::WriteContainer(sbom);
  for (const auto& [path, value] : sbom::FieldPairs(input.root)) {
    EXPECT_EQ(rendered.find(value), std::string::npos) << value;
  }
  EXPECT_EQ(rendered.find("licenseConcluded"), std::string::npos);
}

TEST_F(PipelineTest, ScannerSeesOnlyVersions) {
  auto r = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  const RedactedSbom sbom = MustCountersign(r);
  auto scanner = Open(sbom, {"role:scanner", "cert:fedramp"});
  ASSERT_TRUE(scanner.ok()) << scanner.status();
  EXPECT_EQ(scanner->placeholder_nodes, 0u);
  auto uncertified = Open(sbom, {"role:scanner"});
  ASSERT_TRUE(uncertified.ok());
  // Hand enumeration: nodes 4 and 8 are the version fields.
  std::vector<sbom::NodeId> hidden;
  sbom::ForEachNode(uncertified->tree.root, [&](const sbom::NodeRef& ref) {
    if (ref.node->is_placeholder()) hidden.push_back(ref.id);
  });
  EXPECT_EQ(hidden, (std::vector<sbom::NodeId>{4, 8}));
  PairMultiset visible = Pairs(uncertified->tree.root);
  EXPECT_EQ(visible.size(), 5u);
  EXPECT_EQ(visible.count({"sbom.package.version", "1.0"}), 0u);
}

TEST_F(PipelineTest, TwoInputsNestStandaloneSbom) {
  const SbomTree second = Parse(testing::ReadTestdata("cyclonedx/two-components.cdx.json"));
  auto r = MustRedact({testing::TenNodeTree(), second}, testing::kGatedVersionsPolicy);
  const std::vector<sbom::NodeId> nested = EmbeddedSbomIds(r.redacted.root);
  ASSERT_EQ(nested, (std::vector<sbom::NodeId>{10}));
  auto child = ExtractEmbedded(r.redacted, 10);
  ASSERT_TRUE(child.ok()) << child.status();
  auto hashes = merkle::RedactedPass(r.redacted.root);
  EXPECT_EQ(child->merkle_root, (*hashes)[10]);
  EXPECT_TRUE(VerifySignature(authority_.gen.public_key, child->merkle_root,
                              child->generator_signature));
  EXPECT_TRUE(VerifyEmbeddedChain(r.redacted, 10));
  // The nested SBOM keeps its own keyslot table.
  EXPECT_EQ(child->root.keyslots.size(), 1u);
  auto view = Open(MustCountersign(r), {"role:auditor"});
  ASSERT_TRUE(view.ok()) << view.status();
  EXPECT_EQ(Pairs(view->tree.root.children.back()), Pairs(second.root));
}

TEST_F(PipelineTest, CountersignatureChecks) {
  auto r = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  const RedactedSbom sbom = MustCountersign(r);
  EXPECT_TRUE(VerifySignature(authority_.prod.public_key,
                              sbom.generator_signature,
                              sbom.producer_signature));
  EXPECT_FALSE(VerifySignature(authority_.gen.public_key,
                               sbom.generator_signature,
                               sbom.producer_signature));

  RedactedSbom tampered = r.redacted;
  tampered.root.children[1].children[1].content.back() ^= 1;
  EXPECT_TRUE(HasErrorCode(
      Countersign(tampered, r.plain, authority_.prod.secret_key),
      ErrorCode::kSamenessFailure));

  merkle::PlainSbomBundle altered = r.plain;
  altered.tree.root.children[1].children[0].value = "libz";
  EXPECT_TRUE(HasErrorCode(
      Countersign(r.redacted, altered, authority_.prod.secret_key),
      ErrorCode::kSamenessFailure));
}

TEST_F(PipelineTest, ConsumeFollowsAlgorithmOrder) {
  auto r = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  const RedactedSbom good = MustCountersign(r);
  int decapsulations = 0;
  ConsumeOptions options;
  options.on_decapsulate = [&] { ++decapsulations; };

  RedactedSbom bad_counter = good;
  bad_counter.producer_signature[5] ^= 1;
  EXPECT_TRUE(HasErrorCode(Open(bad_counter, {"role:auditor"}, options),
                           ErrorCode::kUntrustedSbom));
  EXPECT_EQ(decapsulations, 0);

  RedactedSbom uncountersigned = r.redacted;
  EXPECT_TRUE(HasErrorCode(Open(uncountersigned, {"role:auditor"}, options),
                           ErrorCode::kUntrustedSbom));

  RedactedSbom bad_tree = good;
  bad_tree.root.children[0].content.back() ^= 1;
  EXPECT_TRUE(HasErrorCode(Open(bad_tree, {"role:auditor"}, options),
                           ErrorCode::kUntrustedSbom));
  EXPECT_EQ(decapsulations, 0);

  ASSERT_TRUE(Open(good, {"role:auditor"}, options).ok());
  EXPECT_EQ(decapsulations, 1);
  decapsulations = 0;
  ASSERT_TRUE(Open(good, {"role:nobody"}, options).ok());
  EXPECT_EQ(decapsulations, 0);  // unsatisfiable slots are not attempted
}

TEST_F(PipelineTest, LyingGeneratorIsCaught) {
  auto r = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  // A generator that signs a version node whose plain hash commits to
  // something else.
  RedactedSbom lie = r.redacted;
  (*lie.root.children[1].children[1].plain_hash)[0] ^= 1;
  lie.merkle_root = *merkle::MerkleRoot(lie.root);
  lie.generator_signature = Sign(authority_.gen.secret_key, lie.merkle_root);
  lie.producer_signature =
      Sign(authority_.prod.secret_key, lie.generator_signature);
  EXPECT_TRUE(HasErrorCode(Open(lie, {"role:auditor"}),
                           ErrorCode::kGeneratorProducerLied));
  // The public parent package still commits to the honest child hash, so
  // even a consumer without access to the version sees the inconsistency.
  EXPECT_TRUE(HasErrorCode(Open(lie, {"role:nobody"}),
                           ErrorCode::kGeneratorProducerLied));
}

TEST_F(PipelineTest, QueryProvesMembership) {
  auto r = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  const RedactedSbom sbom = MustCountersign(r);
  ConsumeOptions options;
  options.query = *policy::PathSelector::Parse("sbom.package#1.version");
  auto view = Open(sbom, {"role:auditor"}, options);
  ASSERT_TRUE(view.ok()) << view.status();
  ASSERT_TRUE(view->query_proof.has_value());
  EXPECT_EQ(*view->query_node, 8u);
  EXPECT_TRUE(merkle::VerifyMembership(*view->query_proof, sbom.merkle_root));
  options.query = *policy::PathSelector::Parse("**.version");
  EXPECT_TRUE(HasErrorCode(Open(sbom, {"role:auditor"}, options),
                           ErrorCode::kAmbiguousPath));
}

TEST_F(PipelineTest, SamenessReports) {
  const SbomTree input = testing::TenNodeTree();
  auto r = MustRedact(
      {input},
      R"({"rules":[{"paths":["**.licenseConcluded"],"access":"role:legal"},
                   {"paths":["**"],"access":"role:internal"}]})");
  auto honest =
      merkle::VerifySameness(r.redacted.root, r.plain.tree.root, r.plain.salts);
  ASSERT_TRUE(honest.ok());
  EXPECT_TRUE(honest->AllMatch());
  EXPECT_EQ(honest->Count(NodeCheck::kMatch), 10u);

  Node altered = input.root;
  altered.children[2].children[1].value = "2.1";  // node 8
  auto report =
      merkle::VerifySameness(r.redacted.root, altered, r.plain.salts);
  ASSERT_TRUE(report.ok());
  std::vector<sbom::NodeId> mismatched;
  for (size_t i = 0; i < report->nodes.size(); ++i) {
    if (report->nodes[i] == NodeCheck::kMismatch) mismatched.push_back(i);
  }
  EXPECT_EQ(mismatched, (std::vector<sbom::NodeId>{0, 6, 8}));

  // A consumer holding only the license attribute.
  const RedactedSbom sbom = MustCountersign(r);
  auto view = Open(sbom, {"role:legal"});
  ASSERT_TRUE(view.ok());
  auto partial = merkle::VerifySameness(sbom.root, view->tree.root,
                                        view->salts);
  ASSERT_TRUE(partial.ok()) << partial.status();
  EXPECT_EQ(partial->Count(NodeCheck::kMatch), 2u);  // nodes 5 and 9
  EXPECT_EQ(partial->Count(NodeCheck::kUnverifiable), 8u);
  EXPECT_EQ(partial->Count(NodeCheck::kMismatch), 0u);

  std::map<sbom::NodeId, merkle::Salt> missing = r.plain.salts;
  missing.erase(3);
  EXPECT_TRUE(HasErrorCode(
      merkle::VerifySameness(r.redacted.root, input.root, missing),
      ErrorCode::kSaltMissing));
}

TEST_F(PipelineTest, RootsAreFreshPerRedaction) {
  std::set<Digest> roots;
  for (int i = 0; i < 100; ++i) {
    roots.insert(MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy)
                     .redacted.merkle_root);
  }
  EXPECT_EQ(roots.size(), 100u);
}

TEST_F(PipelineTest, ThreeLevelComposition) {
  const std::string_view policy = testing::kGatedVersionsPolicy;
  auto a = MustRedact({testing::TenNodeTree()}, policy);
  const RedactedSbom a_signed = MustCountersign(a);

  SbomTree b_plain = Parse(testing::ReadTestdata("cyclonedx/two-components.cdx.json"));
  auto b = Compose(b_plain, std::span(&a_signed, 1), MustParsePolicy(policy),
                   authority_.pp, authority_.gen.secret_key,
                   authority_.gen.public_key, authority_.prod.public_key,
                   options_);
  ASSERT_TRUE(b.ok()) << b.status();
  const RedactedSbom b_signed = MustCountersign(*b);

  SbomTree c_plain = Hello();
  auto c = Compose(c_plain, std::span(&b_signed, 1), MustParsePolicy(policy),
                   authority_.pp, authority_.gen.secret_key,
                   authority_.gen.public_key, authority_.prod.public_key,
                   options_);
  ASSERT_TRUE(c.ok()) << c.status();
  const RedactedSbom c_signed = MustCountersign(*c);

  const std::vector<sbom::NodeId> nested = EmbeddedSbomIds(c_signed.root);
  ASSERT_EQ(nested.size(), 2u);
  auto b_out = ExtractEmbedded(c_signed, nested[0]);
  auto a_out = ExtractEmbedded(c_signed, nested[1]);
  ASSERT_TRUE(a_out.ok() && b_out.ok());
  EXPECT_EQ(b_out->merkle_root, b_signed.merkle_root);
  EXPECT_EQ(a_out->merkle_root, a_signed.merkle_root);
  EXPECT_EQ(EncodeRedactedTree(a_out->root), EncodeRedactedTree(a_signed.root));
  EXPECT_TRUE(VerifyEmbeddedChain(c_signed, nested[1]));
  // The extracted SBOM is independently consumable.
  auto a_view = Open(*a_out, {"role:auditor"});
  ASSERT_TRUE(a_view.ok()) << a_view.status();
  EXPECT_EQ(a_view->tree.root, testing::TenNodeTree().root);

  // Full consumption of C reaches every level.
  auto c_view = Open(c_signed, {"role:auditor"});
  ASSERT_TRUE(c_view.ok()) << c_view.status();
  EXPECT_EQ(c_view->placeholder_nodes, 0u);

  // Corrupting the embedded bytes breaks the parent chain.
  RedactedSbom corrupt = c_signed;
  merkle::RedactedNode* inner = &corrupt.root.children.back();
  inner->children.back().children[0].content[3] ^= 1;
  EXPECT_TRUE(HasErrorCode(Open(corrupt, {"role:auditor"}),
                           ErrorCode::kUntrustedSbom));

  // Sameness at C covers its own plaintext and takes B as given.
  auto report = merkle::VerifySameness(c_signed.root, c->plain.tree.root,
                                       c->plain.salts);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->Count(NodeCheck::kMismatch), 0u);
  EXPECT_EQ(report->Count(NodeCheck::kAssumed),
            merkle::CountRedacted(b_signed.root));
}

TEST_F(PipelineTest, ComposeRejectsUntrustedChild) {
  auto a = MustRedact({testing::TenNodeTree()}, testing::kGatedVersionsPolicy);
  RedactedSbom bad = MustCountersign(a);
  bad.generator_signature[0] ^= 1;
  auto composed = Compose(Hello(), std::span(&bad, 1),
                          MustParsePolicy(testing::kGatedVersionsPolicy),
                          authority_.pp, authority_.gen.secret_key,
                          authority_.gen.public_key,
                          authority_.prod.public_key, options_);
  EXPECT_TRUE(HasErrorCode(composed, ErrorCode::kUntrustedSbom));
}

TEST_F(PipelineTest, SaltFileRoundTrip) {
  auto r = MustRedact({Hello()}, testing::kGatedVersionsPolicy);
  auto back = merkle::ReadSaltFile(merkle::WriteSaltFile(r.plain));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->tree.root, r.plain.tree.root);
  EXPECT_EQ(back->salts, r.plain.salts);
  EXPECT_EQ(back->plain_root, r.plain.plain_root);
  EXPECT_TRUE(VerifySignature(authority_.gen.public_key, back->plain_root,
                              back->plain_signature));
  EXPECT_TRUE(Countersign(r.redacted, *back, authority_.prod.secret_key).ok());
}

TEST(PipelineBswTest, EndToEndWithPairingScheme) {
  Authority authority = Authority::Create(abe::SchemeId::kBswTypeA, 5);
  DeterministicRandom rng(6);
  RedactOptions options;
  options.rng = &rng;
  const SbomTree input = testing::TenNodeTree();
  auto r = Redact(std::span(&input, 1), MustParsePolicy(testing::kGatedVersionsPolicy),
                  authority.pp, authority.gen.secret_key, options);
  ASSERT_TRUE(r.ok()) << r.status();
  auto sbom = Countersign(r->redacted, r->plain, authority.prod.secret_key);
  ASSERT_TRUE(sbom.ok());
  auto view = Consume(*sbom, authority.pp,
                      authority.Key({"role:scanner", "cert:fedramp"}),
                      authority.gen.public_key, authority.prod.public_key);
  ASSERT_TRUE(view.ok()) << view.status();
  EXPECT_EQ(view->tree.root, input.root);
  auto denied = Consume(*sbom, authority.pp, authority.Key({"cert:fedramp"}),
                        authority.gen.public_key, authority.prod.public_key);
  ASSERT_TRUE(denied.ok());
  EXPECT_EQ(denied->placeholder_nodes, 2u);
}

}  // namespace
}  // namespace petra::pipeline
