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

#include "petra/merkle/merkle.h"

#include <gtest/gtest.h>

#include <cstring>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "petra/common/error.h"
#include "petra/merkle/container.h"
#include "petra/pipeline/pipeline.h"
#include "support/fixtures.h"

namespace petra::merkle {
namespace {

using sbom::Node;
using sbom::NodeKind;

// Hand-rolled canonical encoding, independent of ByteWriter.
Bytes Lp(ByteView data) {
  const uint32_t n = static_cast<uint32_t>(data.size());
  Bytes out = {static_cast<uint8_t>(n >> 24), static_cast<uint8_t>(n >> 16),
  if (!data.empty()) out.insert(out.end(), data.begin(), data.end());
  out.insert(out.end(), data.begin(), data.end());
  return out;
}
Bytes Lp(std::string_view s) { return Lp(AsBytes(s)); }
Bytes Cat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const Bytes& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Bytes Hex(const nlohmann::json& j) {
  return *HexDecode(j.get<std::string>());
}

Salt SaltOf(uint8_t fill) {
  Salt s;
  s.fill(fill);
  return s;
}

// Yields fixed bytes, for pinning AEAD nonces.
class FixedRandom final : public RandomSource {
 public:
  explicit FixedRandom(Bytes bytes) : bytes_(std::move(bytes)) {}
  void Fill(std::span<uint8_t> out) override {
    ASSERT_LE(out.size(), bytes_.size());
    std::memcpy(out.data(), bytes_.data(), out.size());
  }

 private:
  Bytes bytes_;
};

TEST(CommitTest, SaltsSeparateAndBind) {
  const Bytes data = ToBytes("MIT");
  const Digest a = Commit(SaltOf(1), data);
  const Digest b = Commit(SaltOf(2), data);
  EXPECT_NE(a, b);
  EXPECT_TRUE(VerifyCommitment(a, SaltOf(1), data));
  EXPECT_FALSE(VerifyCommitment(a, SaltOf(2), data));
  EXPECT_FALSE(VerifyCommitment(a, SaltOf(1), ToBytes("MIT ")));
}

TEST(CommitTest, MatchesOracle) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  EXPECT_EQ(HexEncode(Commit(SaltOf(0), ToBytes("a"))),
            golden["outputs"]["commit_zero_salt_a"].get<std::string>());
}

TEST(PlainPassTest, SingleFieldIsItsCommitment) {
  const Node field = Node::Field("name", "libx");
  DeterministicRandom rng(1);
  auto pass = ComputePlainPass(field, rng);
  ASSERT_TRUE(pass.ok());
  EXPECT_EQ(pass->plain_hashes[0],
            Commit(pass->salts[0], Cat({Lp("name"), Lp("libx")})));
}

TEST(PlainPassTest, ComplexMatchesHandRolledOracle) {
  const Node tree = Node::Complex(
      "package", {Node::Field("name", "a"), Node::Field("version", "1")});
  const std::vector<Salt> salts = {SaltOf(7), SaltOf(8), SaltOf(9)};
  auto hashes = RecomputePlainHashes(tree, salts);
  ASSERT_TRUE(hashes.ok());
  auto sha = [](const Bytes& b) { return Sha256(b); };
  auto commit = [&](const Salt& s, const Bytes& d) {
    return sha(Cat({Lp(s), Lp(d)}));
  };
  const Digest f0 = commit(salts[1], Cat({Lp("name"), Lp("a")}));
  const Digest f1 = commit(salts[2], Cat({Lp("version"), Lp("1")}));
  const Digest c = sha(Cat({Lp(commit(salts[0], Lp("package"))), Lp(f0),
                            Lp(f1)}));
  EXPECT_EQ((*hashes)[0], c);
  EXPECT_EQ((*hashes)[1], f0);
  EXPECT_EQ((*hashes)[2], f1);
}

TEST(PlainPassTest, ChildOrderMatters) {
  const Node a = Node::Complex(
      "package", {Node::Field("name", "a"), Node::Field("version", "1")});
  const Node b = Node::Complex(
      "package", {Node::Field("version", "1"), Node::Field("name", "a")});
  const std::vector<Salt> salts = {SaltOf(7), SaltOf(8), SaltOf(8)};
  EXPECT_NE((*RecomputePlainHashes(a, salts))[0],
            (*RecomputePlainHashes(b, salts))[0]);
}

TEST(PlainPassTest, RejectsPlaceholders) {
  DeterministicRandom rng(1);
  EXPECT_TRUE(HasErrorCode(
      ComputePlainPass(Node::Placeholder("00", "11"), rng),
      ErrorCode::kMalformedDocument));
}

// Builds the golden 3-node tree through the library's own primitives.
struct GoldenTree {
  RedactedNode root;
  std::vector<Digest> plain;
};

GoldenTree BuildGolden(const nlohmann::json& in, bool redact_field) {
  const Node field = Node::Field(in["field_name"], in["field_value"]);
  const Node complex = Node::Complex(in["element_type"], {field});
  const Node sbom = Node::Sbom(in["index"], in["doc_meta"], {complex});
  Salt ss, sc, sf;
  const Bytes salt_s = Hex(in["salt_sbom"]), salt_c = Hex(in["salt_complex"]),
              salt_f = Hex(in["salt_field"]);
  std::copy(salt_s.begin(), salt_s.end(), ss.begin());
  std::copy(salt_c.begin(), salt_c.end(), sc.begin());
  std::copy(salt_f.begin(), salt_f.end(), sf.begin());
  GoldenTree out;
  out.plain = *RecomputePlainHashes(sbom, {ss, sc, sf});

  abe::PolicyKeySlot slot;
  slot.encapsulated_key = Hex(in["keyslot"]);
  const auto access = *policy::ParseAccessExpression(in["access"].get<std::string>());
  slot.policy_id = policy::PolicyId(access);

  RedactedNode f;
  f.kind = NodeKind::kField;
  f.plain_hash = out.plain[2];
  if (redact_field) {
    abe::SymmetricKey key;
    const Bytes raw_key = Hex(in["aes_key"]);
    std::copy(raw_key.begin(), raw_key.end(), key.begin());
    FixedRandom nonce(Hex(in["nonce"]));
    f.marker = Marker::kRedacted;
    f.slot = 0;
    f.content = abe::EncryptNode(key, slot.policy_id, sf, NodePayload(field),
                                 nonce)
                    .Encode();
  } else {
    f.content = Cat({Lp(sf), Lp(NodePayload(field))});
  }
  RedactedNode c;
  c.kind = NodeKind::kComplex;
  c.plain_hash = out.plain[1];
  c.content = Cat({Lp(sc), Lp(NodePayload(complex))});
  c.children = {f};
  out.root.kind = NodeKind::kSbom;
  out.root.plain_hash = out.plain[0];
  out.root.content = Cat({Lp(ss), Lp(NodePayload(sbom))});
  if (redact_field) out.root.keyslots = {slot};
  out.root.children = {c};
  return out;
}

TEST(GoldenVectorTest, ReproducesOracleDigests) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  const auto& in = golden["inputs"];
  const auto& want = golden["outputs"];
  GoldenTree tree = BuildGolden(in, /*redact_field=*/true);

  EXPECT_EQ(HexEncode(tree.plain[2]), want["h_F_plain"]);
  EXPECT_EQ(HexEncode(tree.plain[1]), want["h_C_plain"]);
  EXPECT_EQ(HexEncode(tree.plain[0]), want["h_S_plain"]);
  EXPECT_EQ(HexEncode(tree.root.children[0].children[0].content),
            golden["intermediate"]["node_ciphertext"]);
  EXPECT_EQ(HexEncode(*SlotAccessEncoding(tree.root.keyslots[0])),
            golden["intermediate"]["access_encoding"]);

  auto hashes = RedactedPass(tree.root);
  ASSERT_TRUE(hashes.ok()) << hashes.status();
  EXPECT_EQ(HexEncode((*hashes)[2]), want["h_F"]);
  EXPECT_EQ(HexEncode((*hashes)[1]), want["h_C"]);
  EXPECT_EQ(HexEncode((*hashes)[0]), want["merkle_root"]);
}

TEST(GoldenVectorTest, AllPublicRootFromPlaintextAlone) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  GoldenTree tree = BuildGolden(golden["inputs"], /*redact_field=*/false);
  EXPECT_EQ(HexEncode(*MerkleRoot(tree.root)),
            golden["outputs"]["all_public_merkle_root"]);
}

TEST(RedactedPassTest, EveryCiphertextByteReachesTheRoot) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  GoldenTree tree = BuildGolden(golden["inputs"], true);
  const Digest root = *MerkleRoot(tree.root);
  Bytes& ct = tree.root.children[0].children[0].content;
  for (size_t i = 0; i < ct.size(); ++i) {
    ct[i] ^= 0x01;
    EXPECT_NE(*MerkleRoot(tree.root), root) << "byte " << i;
    ct[i] ^= 0x01;
  }
}

TEST(RedactedPassTest, MissingPlainHash) {
  RedactedNode root;
  root.kind = NodeKind::kSbom;
  EXPECT_TRUE(
      HasErrorCode(RedactedPass(root), ErrorCode::kMissingPlainHash));
}

TEST(RedactedPassTest, DanglingSlotIsMalformed) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  GoldenTree tree = BuildGolden(golden["inputs"], true);
  tree.root.children[0].children[0].slot = 3;
  EXPECT_TRUE(
      HasErrorCode(RedactedPass(tree.root), ErrorCode::kMalformedDocument));
}

class MembershipTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto authority = testing::Authority::Create(abe::SchemeId::kInsecureTest, 3);
    DeterministicRandom rng(11);
    pipeline::RedactOptions options;
    options.rng = &rng;
    const sbom::SbomTree tree = testing::TenNodeTree();
    auto result = pipeline::Redact(
        std::span(&tree, 1),
        testing::MustParsePolicy(testing::kGatedVersionsPolicy), authority.pp,
        authority.gen.secret_key, options);
    ASSERT_TRUE(result.ok()) << result.status();
    redacted_ = result->redacted;
  }
  RedactedSbom redacted_;
};

TEST_F(MembershipTest, LeafInThreeNodeTreeHasTwoSteps) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  GoldenTree tree = BuildGolden(golden["inputs"], true);
  auto proof = ProveMembership(tree.root, 2);
  ASSERT_TRUE(proof.ok());
  EXPECT_EQ(proof->path.size(), 2u);
  const Digest root = *MerkleRoot(tree.root);
  EXPECT_TRUE(VerifyMembership(*proof, root));
  EXPECT_FALSE(VerifyMembership(*proof, redacted_.merkle_root));
}

TEST_F(MembershipTest, EveryNodeProvesAndEverySiblingPerturbationFails) {
  ASSERT_EQ(CountRedacted(redacted_.root), 10u);
  size_t perturbations = 0;
  for (sbom::NodeId id = 0; id < 10; ++id) {
    auto proof = ProveMembership(redacted_.root, id);
    ASSERT_TRUE(proof.ok()) << id;
    EXPECT_TRUE(VerifyMembership(*proof, redacted_.merkle_root)) << id;
    auto round_trip = MembershipProof::Decode(proof->Encode());
    ASSERT_TRUE(round_trip.ok());
    EXPECT_EQ(*round_trip, *proof);
    for (size_t s = 0; s < proof->path.size(); ++s) {
      for (size_t k = 0; k < proof->path[s].siblings.size(); ++k) {
        MembershipProof bad = *proof;
        bad.path[s].siblings[k][k % kDigestSize] ^= 0x80;
        EXPECT_FALSE(VerifyMembership(bad, redacted_.merkle_root));
        ++perturbations;
      }
    }
    for (size_t k = 0; k < proof->target_children.size(); ++k) {
      MembershipProof bad = *proof;
      bad.target_children[k][0] ^= 0x01;
      EXPECT_FALSE(VerifyMembership(bad, redacted_.merkle_root));
      ++perturbations;
    }
  }
  EXPECT_GT(perturbations, 20u);
  EXPECT_TRUE(HasErrorCode(ProveMembership(redacted_.root, 10),
                           ErrorCode::kNodeNotFound));
}

TEST_F(MembershipTest, SelectorResolution) {
  const Node view = testing::TenNodeTree().root;
  EXPECT_EQ(*ResolveUniqueNode(view, *policy::PathSelector::Parse(
                                         "sbom.package#1.version")),
            8u);
  EXPECT_TRUE(HasErrorCode(
      ResolveUniqueNode(view, *policy::PathSelector::Parse("**.version")),
      ErrorCode::kAmbiguousPath));
  EXPECT_TRUE(HasErrorCode(
      ResolveUniqueNode(view, *policy::PathSelector::Parse("**.supplier")),
      ErrorCode::kNodeNotFound));
}

TEST_F(MembershipTest, ContainerRoundTrip) {
  const std::string text = WriteContainer(redacted_);
  auto back = ReadContainer(text);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, redacted_);
  auto index = PublicRootIndex(back->root);
  ASSERT_TRUE(index.has_value());
  EXPECT_EQ(index->index, "pkg:generic/app@1.0");
  EXPECT_TRUE(HasErrorCode(ReadContainer("{}"), ErrorCode::kMalformedDocument));
  EXPECT_TRUE(
      HasErrorCode(ReadContainer("not json"), ErrorCode::kMalformedDocument));
}

TEST(ContainerTest, TreeDecodeRejectsTruncation) {
  const auto golden = nlohmann::json::parse(
      testing::ReadTestdata("vectors/merkle_golden.json"));
  GoldenTree tree = BuildGolden(golden["inputs"], true);
  const Bytes encoded = EncodeRedactedTree(tree.root);
  ASSERT_EQ(*DecodeRedactedTree(encoded), tree.root);
  for (size_t cut = 0; cut < encoded.size(); cut += 7) {
    EXPECT_FALSE(DecodeRedactedTree(ByteView(encoded).first(cut)).ok());
  }
}

}  // namespace
}  // namespace petra::merkle
