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

// Shared fixtures for pipeline-level tests.

#ifndef PETRA_TESTS_SUPPORT_FIXTURES_H_
#define PETRA_TESTS_SUPPORT_FIXTURES_H_

#include <fstream>
#include <sstream>
#include <string>

#include "petra/abe/abkem.h"
#include "petra/crypto/primitives.h"
#include "petra/policy/redaction_policy.h"
#include "petra/sbom/tree.h"

namespace petra::testing {

inline std::string ReadTestdata(const std::string& relative) {
  std::ifstream in(std::string(PETRA_TESTDATA_DIR) + "/" + relative,
                   std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ABE parameters, generator and producer signing keys.
struct Authority {
  abe::PublicParams pp;
  abe::MasterKey mk;
  SigningKeyPair gen;
  SigningKeyPair prod;

  static Authority Create(abe::SchemeId scheme, uint64_t seed) {
    DeterministicRandom rng(seed);
    auto [pp, mk] = *abe::AbeSetup(scheme, rng);
    return {pp, mk, SigningKeyPair::Generate(rng),
            SigningKeyPair::Generate(rng)};
  }

  abe::AttributeSecretKey Key(const policy::AttributeSet& attrs,
                              uint64_t seed = 7) const {
    DeterministicRandom rng(seed);
    return *abe::AbeKeyGen(pp, mk, attrs, rng);
  }
};

// Ten nodes:
//   0 sbom
//   1   name=app
//   2   package
//   3     name=liba
//   4     version=1.0
//   5     licenseConcluded=MIT
//   6   package
//   7     name=libb
//   8     version=2.0
//   9     licenseConcluded=Apache-2.0
inline sbom::SbomTree TenNodeTree() {
  using sbom::Node;
  return {Node::Sbom("pkg:generic/app@1.0", "Native",
                     {Node::Field("name", "app"),
                      Node::Complex("package",
                                    {Node::Field("name", "liba"),
                                     Node::Field("version", "1.0"),
                                     Node::Field("licenseConcluded", "MIT")}),
                      Node::Complex(
                          "package",
                          {Node::Field("name", "libb"),
                           Node::Field("version", "2.0"),
                           Node::Field("licenseConcluded", "Apache-2.0")})}),
          sbom::SourceFormat::kNative};
}

inline policy::RedactionPolicy MustParsePolicy(std::string_view json) {
  return *policy::ParsePolicy(AsBytes(json));
}

inline constexpr char kGatedVersionsPolicy[] =
    R"({"rules":[{"paths":["**.version"],"access":"(role:scanner AND cert:fedramp) OR role:auditor OR org:federal"}],"default":"public"})";

}  // namespace petra::testing

#endif  // PETRA_TESTS_SUPPORT_FIXTURES_H_
