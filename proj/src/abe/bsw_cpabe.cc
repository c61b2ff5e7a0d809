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

#include "petra/abe/bsw_cpabe.h"

#include <algorithm>
#include <functional>
#include <optional>

#include "petra/common/error.h"

namespace petra::abe::bsw {
namespace {

using policy::AccessTree;
using type_a::GroupOrder;
using type_a::ScalarMod;

constexpr uint8_t kCiphertextVersion = 1;

// Leaf predicate: (preorder leaf index, attribute) -> usable.
using LeafUsable = std::function<bool(size_t, const std::string&)>;

// Minimum number of usable leaves needed to satisfy `node`, or nullopt.
std::optional<size_t> MinLeaves(const AccessTree& node, size_t first_leaf,
                                const LeafUsable& usable) {
  if (node.is_leaf()) {
    if (usable(first_leaf, node.attribute())) return 1;
    return std::nullopt;
  }
  std::vector<size_t> costs;
  size_t cursor = first_leaf;
  for (const AccessTree& child : node.children()) {
    if (auto cost = MinLeaves(child, cursor, usable)) costs.push_back(*cost);
    cursor += child.LeafCount();
  }
  const size_t k = static_cast<size_t>(node.threshold());
  if (costs.size() < k) return std::nullopt;
  std::partial_sort(costs.begin(), costs.begin() + k, costs.end());
  size_t total = 0;
  for (size_t i = 0; i < k; ++i) total += costs[i];
  return total;
}

// Lagrange coefficient at x = 0 for index i over the index set S.
mpz_class Lagrange(int i, const std::vector<int>& indices) {
  mpz_class num = 1, den = 1;
  for (int j : indices) {
    if (j == i) continue;
    num = ScalarMod(num * j);
    den = ScalarMod(den * (j - i));
  }
  return ScalarMod(num * type_a::ScalarInverse(den));
}

// Picks a cheapest satisfying leaf set and records each leaf's flattened
// Lagrange coefficient. Precondition: MinLeaves(node) has a value.
void CollectCoefficients(const AccessTree& node, size_t first_leaf,
                         const LeafUsable& usable, const mpz_class& coeff,
                         std::map<size_t, mpz_class>& out) {
  if (node.is_leaf()) {
    out[first_leaf] = coeff;
    return;
  }
  struct Candidate {
    size_t cost;
    int index;  // 1-based child position
    size_t first_leaf;
  };
  std::vector<Candidate> candidates;
  size_t cursor = first_leaf;
  int index = 1;
  for (const AccessTree& child : node.children()) {
    if (auto cost = MinLeaves(child, cursor, usable)) {
      candidates.push_back({*cost, index, cursor});
    }
    cursor += child.LeafCount();
    ++index;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.cost < b.cost;
                   });
  candidates.resize(static_cast<size_t>(node.threshold()));
  std::vector<int> chosen;
  for (const Candidate& c : candidates) chosen.push_back(c.index);
  for (const Candidate& c : candidates) {
    const AccessTree& child = node.children()[c.index - 1];
    CollectCoefficients(child, c.first_leaf, usable,
                        ScalarMod(coeff * Lagrange(c.index, chosen)), out);
  }
}

absl::StatusOr<std::map<size_t, mpz_class>> PlanDecryption(
    const AccessTree& tree, const LeafUsable& usable) {
  if (!MinLeaves(tree, 0, usable).has_value()) {
    return Error(ErrorCode::kDecapsulationFailure,
                 "attributes do not satisfy the access tree");
  }
  std::map<size_t, mpz_class> coefficients;
  CollectCoefficients(tree, 0, usable, mpz_class(1), coefficients);
  return coefficients;
}

// Shares `secret` down the tree: each gate gets a random polynomial of
// degree k-1 with q(0) equal to its parent's share at its index.
void ShareSecret(const AccessTree& node, const mpz_class& secret,
                 RandomSource& rng, std::vector<mpz_class>& leaf_shares) {
  if (node.is_leaf()) {
    leaf_shares.push_back(secret);
    return;
  }
  std::vector<mpz_class> coeffs = {secret};
  for (int i = 1; i < node.threshold(); ++i) {
    coeffs.push_back(type_a::RandomScalar(rng));
  }
  for (size_t i = 0; i < node.children().size(); ++i) {
    const mpz_class x = static_cast<unsigned long>(i + 1);
    mpz_class y = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      y = ScalarMod(y * x + *it);
    }
    ShareSecret(node.children()[i], y, rng, leaf_shares);
  }
}

void CollectLeafAttributes(const AccessTree& node,
                           std::vector<const std::string*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node.attribute());
    return;
  }
  for (const AccessTree& child : node.children()) {
    CollectLeafAttributes(child, out);
  }
}

absl::StatusOr<G1> ReadG1(ByteReader& in) {
  PETRA_ASSIGN_OR_RETURN(ByteView raw, in.Raw(type_a::kG1Bytes));
  return type_a::DecodeG1(raw);
}

absl::Status MalformedKey(std::string_view what) {
  return Error(ErrorCode::kMalformedKey, what);
}

}  // namespace

policy::AttributeSet SecretKey::Attributes() const {
  policy::AttributeSet out;
  for (const Component& c : components) out.insert(c.attribute);
  return out;
}

std::pair<PublicParams, MasterKey> Setup(RandomSource& rng) {
  const G1 g = type_a::RandomG1(rng);
  const mpz_class alpha = type_a::RandomScalar(rng);
  const mpz_class beta = type_a::RandomScalar(rng);
  PublicParams pp{
      .g = g,
      .h = type_a::Mul(g, beta),
      .f = type_a::Mul(g, type_a::ScalarInverse(beta)),
      .egg_alpha = type_a::GtPow(type_a::Pair(g, g), alpha),
  };
  MasterKey mk{.beta = beta, .g_alpha = type_a::Mul(g, alpha)};
  return {std::move(pp), std::move(mk)};
}

absl::StatusOr<SecretKey> KeyGen(const PublicParams& pp, const MasterKey& mk,
                                 const policy::AttributeSet& attributes,
                                 RandomSource& rng) {
  if (attributes.empty()) {
    return Error(ErrorCode::kEmptyAttributeSet, "key needs attributes");
  }
  for (const std::string& attr : attributes) {
    if (!policy::IsValidAttribute(attr)) {
      return Error(ErrorCode::kPolicySyntax, "invalid attribute '" + attr + "'");
    }
  }
  const mpz_class r = type_a::RandomScalar(rng);
  const G1 g_r = type_a::Mul(pp.g, r);
  SecretKey sk;
  sk.d = type_a::Mul(type_a::Add(mk.g_alpha, g_r),
                     type_a::ScalarInverse(mk.beta));
  for (const std::string& attr : attributes) {
    const mpz_class r_j = type_a::RandomScalar(rng);
    sk.components.push_back({
        .attribute = attr,
        .d = type_a::Add(g_r, type_a::Mul(type_a::HashToG1(AsBytes(attr)), r_j)),
        .d_prime = type_a::Mul(pp.g, r_j),
    });
  }
  return sk;
}

std::pair<Ciphertext, Gt> Encapsulate(const PublicParams& pp,
                                      const AccessTree& tree,
                                      RandomSource& rng) {
  const mpz_class s = type_a::RandomScalar(rng);
  std::vector<mpz_class> shares;
  ShareSecret(tree, s, rng, shares);
  std::vector<const std::string*> attrs;
  CollectLeafAttributes(tree, attrs);

  Ciphertext ct;
  ct.tree = tree;
  ct.c = type_a::Mul(pp.h, s);
  ct.leaves.reserve(shares.size());
  for (size_t i = 0; i < shares.size(); ++i) {
    ct.leaves.push_back({
        .c = type_a::Mul(pp.g, shares[i]),
        .c_prime = type_a::Mul(type_a::HashToG1(AsBytes(*attrs[i])), shares[i]),
    });
  }
  return {std::move(ct), type_a::GtPow(pp.egg_alpha, s)};
}

absl::StatusOr<Gt> Decapsulate(const Ciphertext& ct, const SecretKey& sk) {
  if (ct.leaves.size() != ct.tree.LeafCount()) {
    return Error(ErrorCode::kDecapsulationFailure, "ciphertext leaf mismatch");
  }
  std::map<std::string, const SecretKey::Component*> by_attr;
  for (const auto& c : sk.components) by_attr[c.attribute] = &c;

  PETRA_ASSIGN_OR_RETURN(
      auto coefficients,
      PlanDecryption(ct.tree, [&](size_t, const std::string& attr) {
        return by_attr.contains(attr);
      }));

  std::vector<const std::string*> attrs;
  CollectLeafAttributes(ct.tree, attrs);
  // e(C, D) * prod_y e(D_j, C_y)^(-lambda_y) * e(D'_j, C'_y)^(lambda_y)
  std::vector<type_a::PairingTerm> terms;
  terms.reserve(1 + 2 * coefficients.size());
  terms.push_back({&ct.c, &sk.d, mpz_class(1)});
  for (const auto& [leaf, lambda] : coefficients) {
    const SecretKey::Component* comp = by_attr.at(*attrs[leaf]);
    terms.push_back({&comp->d, &ct.leaves[leaf].c, ScalarMod(-lambda)});
    terms.push_back({&comp->d_prime, &ct.leaves[leaf].c_prime, lambda});
  }
  return type_a::MultiPair(terms);
}

absl::StatusOr<Gt> DecapsulateEncoded(ByteView ciphertext,
                                      ByteView secret_key) {
  ByteReader ct_in(ciphertext);
  PETRA_ASSIGN_OR_RETURN(uint8_t version, ct_in.U8());
  if (version != kCiphertextVersion) {
    return Error(ErrorCode::kDecapsulationFailure, "unknown ciphertext version");
  }
  PETRA_ASSIGN_OR_RETURN(ByteView tree_bytes, ct_in.Lp());
  PETRA_ASSIGN_OR_RETURN(AccessTree tree, policy::DecodeAccessTree(tree_bytes));
  PETRA_ASSIGN_OR_RETURN(ByteView c_raw, ct_in.Raw(type_a::kG1Bytes));
  PETRA_ASSIGN_OR_RETURN(uint32_t n, ct_in.U32());
  if (n != tree.LeafCount()) {
    return Error(ErrorCode::kDecapsulationFailure, "ciphertext leaf mismatch");
  }
  std::vector<std::pair<ByteView, ByteView>> leaf_raw;
  for (uint32_t i = 0; i < n; ++i) {
    PETRA_ASSIGN_OR_RETURN(ByteView c, ct_in.Raw(type_a::kG1Bytes));
    PETRA_ASSIGN_OR_RETURN(ByteView c_prime, ct_in.Raw(type_a::kG1Bytes));
    leaf_raw.emplace_back(c, c_prime);
  }
  if (!ct_in.empty()) {
    return Error(ErrorCode::kDecapsulationFailure, "trailing ciphertext bytes");
  }

  ByteReader sk_in(secret_key);
  PETRA_ASSIGN_OR_RETURN(ByteView d_raw, sk_in.Raw(type_a::kG1Bytes));
  PETRA_ASSIGN_OR_RETURN(uint32_t m, sk_in.U32());
  if (m > sk_in.remaining()) return MalformedKey("truncated secret key");
  std::map<std::string, std::pair<ByteView, ByteView>> by_attr;
  for (uint32_t i = 0; i < m; ++i) {
    PETRA_ASSIGN_OR_RETURN(std::string attribute, sk_in.LpString());
    PETRA_ASSIGN_OR_RETURN(ByteView d, sk_in.Raw(type_a::kG1Bytes));
    PETRA_ASSIGN_OR_RETURN(ByteView d_prime, sk_in.Raw(type_a::kG1Bytes));
    by_attr[attribute] = {d, d_prime};
  }
  if (!sk_in.empty()) return MalformedKey("trailing bytes in secret key");

  PETRA_ASSIGN_OR_RETURN(
      auto coefficients,
      PlanDecryption(tree, [&](size_t, const std::string& attr) {
        return by_attr.contains(attr);
      }));
  std::vector<const std::string*> attrs;
  CollectLeafAttributes(tree, attrs);

  // Decoded points must outlive the pairing terms that point at them.
  std::vector<G1> points;
  points.reserve(2 + 4 * coefficients.size());
  PETRA_ASSIGN_OR_RETURN(points.emplace_back(), type_a::DecodeG1(c_raw));
  PETRA_ASSIGN_OR_RETURN(points.emplace_back(), type_a::DecodeG1(d_raw));
  std::vector<type_a::PairingTerm> terms;
  terms.reserve(1 + 2 * coefficients.size());
  terms.push_back({&points[0], &points[1], mpz_class(1)});
  for (const auto& [leaf, lambda] : coefficients) {
    const auto& [d, d_prime] = by_attr.at(*attrs[leaf]);
    const size_t base = points.size();
    PETRA_ASSIGN_OR_RETURN(points.emplace_back(), type_a::DecodeG1(d));
    PETRA_ASSIGN_OR_RETURN(points.emplace_back(),
                           type_a::DecodeG1(leaf_raw[leaf].first));
    PETRA_ASSIGN_OR_RETURN(points.emplace_back(), type_a::DecodeG1(d_prime));
    PETRA_ASSIGN_OR_RETURN(points.emplace_back(),
                           type_a::DecodeG1(leaf_raw[leaf].second));
    terms.push_back({&points[base], &points[base + 1], ScalarMod(-lambda)});
    terms.push_back({&points[base + 2], &points[base + 3], lambda});
  }
  return type_a::MultiPair(terms);
}

Gt LeafTranscript(const SecretKey::Component& component,
                  const Ciphertext::Leaf& leaf) {
  return type_a::GtMul(type_a::Pair(component.d, leaf.c),
                       type_a::GtInverse(type_a::Pair(component.d_prime,
                                                      leaf.c_prime)));
}

absl::StatusOr<Gt> Unlock(const Ciphertext& ct, const G1& d,
                          const std::map<size_t, Gt>& transcripts) {
  PETRA_ASSIGN_OR_RETURN(
      auto coefficients,
      PlanDecryption(ct.tree, [&](size_t leaf, const std::string&) {
        return transcripts.contains(leaf);
      }));
  Gt blinding = type_a::GtOne();
  for (const auto& [leaf, lambda] : coefficients) {
    blinding = type_a::GtMul(blinding,
                             type_a::GtPow(transcripts.at(leaf), lambda));
  }
  return type_a::GtMul(type_a::Pair(ct.c, d), type_a::GtInverse(blinding));
}

Bytes EncodePublicParams(const PublicParams& pp) {
  ByteWriter out;
  out.Raw(type_a::EncodeG1(pp.g))
      .Raw(type_a::EncodeG1(pp.h))
      .Raw(type_a::EncodeG1(pp.f))
      .Raw(type_a::EncodeGt(pp.egg_alpha));
  return std::move(out).Take();
}

absl::StatusOr<PublicParams> DecodePublicParams(ByteView bytes) {
  ByteReader in(bytes);
  PublicParams pp;
  PETRA_ASSIGN_OR_RETURN(pp.g, ReadG1(in));
  PETRA_ASSIGN_OR_RETURN(pp.h, ReadG1(in));
  PETRA_ASSIGN_OR_RETURN(pp.f, ReadG1(in));
  PETRA_ASSIGN_OR_RETURN(ByteView gt, in.Raw(type_a::kGtBytes));
  PETRA_ASSIGN_OR_RETURN(pp.egg_alpha, type_a::DecodeGt(gt));
  if (!in.empty()) return MalformedKey("trailing bytes in public params");
  return pp;
}

Bytes EncodeMasterKey(const MasterKey& mk) {
  ByteWriter out;
  out.Raw(type_a::EncodeScalar(mk.beta)).Raw(type_a::EncodeG1(mk.g_alpha));
  return std::move(out).Take();
}

absl::StatusOr<MasterKey> DecodeMasterKey(ByteView bytes) {
  ByteReader in(bytes);
  MasterKey mk;
  PETRA_ASSIGN_OR_RETURN(ByteView beta, in.Raw(type_a::kScalarBytes));
  PETRA_ASSIGN_OR_RETURN(mk.beta, type_a::DecodeScalar(beta));
  PETRA_ASSIGN_OR_RETURN(mk.g_alpha, ReadG1(in));
  if (!in.empty() || mk.beta == 0) return MalformedKey("bad master key");
  return mk;
}

Bytes EncodeSecretKey(const SecretKey& sk) {
  ByteWriter out;
  out.Raw(type_a::EncodeG1(sk.d))
      .U32(static_cast<uint32_t>(sk.components.size()));
  for (const auto& c : sk.components) {
    out.Lp(c.attribute)
        .Raw(type_a::EncodeG1(c.d))
        .Raw(type_a::EncodeG1(c.d_prime));
  }
  return std::move(out).Take();
}

absl::StatusOr<SecretKey> DecodeSecretKey(ByteView bytes) {
  ByteReader in(bytes);
  SecretKey sk;
  PETRA_ASSIGN_OR_RETURN(sk.d, ReadG1(in));
  PETRA_ASSIGN_OR_RETURN(uint32_t n, in.U32());
  if (n > in.remaining()) return MalformedKey("truncated secret key");
  for (uint32_t i = 0; i < n; ++i) {
    SecretKey::Component c;
    PETRA_ASSIGN_OR_RETURN(c.attribute, in.LpString());
    PETRA_ASSIGN_OR_RETURN(c.d, ReadG1(in));
    PETRA_ASSIGN_OR_RETURN(c.d_prime, ReadG1(in));
    sk.components.push_back(std::move(c));
  }
  if (!in.empty()) return MalformedKey("trailing bytes in secret key");
  return sk;
}

Bytes EncodeCiphertext(const Ciphertext& ct) {
  ByteWriter out;
  out.U8(kCiphertextVersion)
      .Lp(policy::EncodeAccessTree(ct.tree))
      .Raw(type_a::EncodeG1(ct.c))
      .U32(static_cast<uint32_t>(ct.leaves.size()));
  for (const auto& leaf : ct.leaves) {
    out.Raw(type_a::EncodeG1(leaf.c)).Raw(type_a::EncodeG1(leaf.c_prime));
  }
  return std::move(out).Take();
}

absl::StatusOr<Ciphertext> DecodeCiphertext(ByteView bytes) {
  ByteReader in(bytes);
  PETRA_ASSIGN_OR_RETURN(uint8_t version, in.U8());
  if (version != kCiphertextVersion) {
    return Error(ErrorCode::kDecapsulationFailure, "unknown ciphertext version");
  }
  Ciphertext ct;
  PETRA_ASSIGN_OR_RETURN(ByteView tree, in.Lp());
  PETRA_ASSIGN_OR_RETURN(ct.tree, policy::DecodeAccessTree(tree));
  PETRA_ASSIGN_OR_RETURN(ct.c, ReadG1(in));
  PETRA_ASSIGN_OR_RETURN(uint32_t n, in.U32());
  if (n != ct.tree.LeafCount()) {
    return Error(ErrorCode::kDecapsulationFailure, "ciphertext leaf mismatch");
  }
  for (uint32_t i = 0; i < n; ++i) {
    Ciphertext::Leaf leaf;
    PETRA_ASSIGN_OR_RETURN(leaf.c, ReadG1(in));
    PETRA_ASSIGN_OR_RETURN(leaf.c_prime, ReadG1(in));
    ct.leaves.push_back(std::move(leaf));
  }
  if (!in.empty()) {
    return Error(ErrorCode::kDecapsulationFailure, "trailing ciphertext bytes");
  }
  return ct;
}

}  // namespace petra::abe::bsw
