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

#include "petra/abe/abkem.h"

#include <algorithm>
#include <cstring>

#include "petra/abe/bsw_cpabe.h"
#include "petra/common/error.h"

namespace petra::abe {
namespace {

using policy::AccessTree;
using policy::AttributeSet;

constexpr std::string_view kKeyMagic = "PABE";
constexpr size_t kConfirmSize = 16;
constexpr uint8_t kInsecureCtVersion = 1;
constexpr size_t kInsecureSecretSize = 32;

absl::Status DecapFailure(std::string_view what) {
  return Error(ErrorCode::kDecapsulationFailure, what);
}

// Shared secret -> (symmetric key, key-confirmation tag over the ciphertext).
std::pair<SymmetricKey, Bytes> DeriveKey(ByteView secret, ByteView scheme_ct) {
  SymmetricKey key;
  Digest k = HmacSha256(secret, AsBytes("petra abkem key v1"));
  std::copy(k.begin(), k.end(), key.begin());
  ByteWriter label;
  label.Raw(AsBytes("petra abkem confirm v1")).Raw(scheme_ct);
  Digest c = HmacSha256(secret, label.bytes());
  return {key, Bytes(c.begin(), c.begin() + kConfirmSize)};
}

Bytes EncodeAttributeList(const AttributeSet& attributes) {
  ByteWriter out;
  out.U32(static_cast<uint32_t>(attributes.size()));
  for (const std::string& a : attributes) out.Lp(a);
  return std::move(out).Take();
}

// --- Insecure test backend -------------------------------------------------
//   pp = mk = 32-byte secret m
//   sk = attribute list || HMAC(m, "sk" || attribute list)
//   ct = version || lp(tree) || nonce(16) || secret XOR HMAC(m, nonce || tree)

Digest InsecurePad(ByteView m, ByteView nonce, ByteView tree) {
  ByteWriter in;
  in.Raw(AsBytes("pad")).Raw(nonce).Raw(tree);
  return HmacSha256(m, in.bytes());
}

Digest InsecureKeyMac(ByteView m, ByteView attribute_list) {
  ByteWriter in;
  in.Raw(AsBytes("sk")).Raw(attribute_list);
  return HmacSha256(m, in.bytes());
}

absl::StatusOr<AttributeSet> ParseAttributeList(ByteReader& in) {
  PETRA_ASSIGN_OR_RETURN(uint32_t n, in.U32());
  if (n > in.remaining()) {
    return Error(ErrorCode::kMalformedKey, "truncated attribute list");
  }
  AttributeSet out;
  for (uint32_t i = 0; i < n; ++i) {
    PETRA_ASSIGN_OR_RETURN(std::string attr, in.LpString());
    out.insert(std::move(attr));
  }
  return out;
}

absl::StatusOr<AccessTree> CiphertextTree(ByteView scheme_ct) {
  ByteReader in(scheme_ct);
  PETRA_ASSIGN_OR_RETURN(uint8_t version, in.U8());
  (void)version;
  PETRA_ASSIGN_OR_RETURN(ByteView tree, in.Lp());
  return policy::DecodeAccessTree(tree);
}

struct ParsedSlot {
  SchemeId scheme;
  ByteView scheme_ct;
  ByteView confirm;
};

absl::StatusOr<ParsedSlot> ParseSlot(const PolicyKeySlot& slot) {
  ByteReader in(slot.encapsulated_key);
  auto scheme = in.U8();
  if (!scheme.ok()) return DecapFailure("empty key slot");
  auto ct = in.Lp();
  if (!ct.ok()) return DecapFailure("truncated key slot");
  auto confirm = in.Raw(kConfirmSize);
  if (!confirm.ok() || !in.empty()) return DecapFailure("malformed key slot");
  return ParsedSlot{static_cast<SchemeId>(*scheme), *ct, *confirm};
}

absl::StatusOr<KeyKind> ReadHeader(ByteReader& in, SchemeId& scheme) {
  auto magic = in.Raw(kKeyMagic.size());
  if (!magic.ok() || ToString(*magic) != kKeyMagic) {
    return Error(ErrorCode::kMalformedKey, "missing PABE magic");
  }
  PETRA_ASSIGN_OR_RETURN(uint8_t id, in.U8());
  PETRA_ASSIGN_OR_RETURN(uint8_t kind, in.U8());
  if (id != static_cast<uint8_t>(SchemeId::kBswTypeA) &&
      id != static_cast<uint8_t>(SchemeId::kInsecureTest)) {
    return Error(ErrorCode::kMalformedKey, "unknown scheme id");
  }
  scheme = static_cast<SchemeId>(id);
  return static_cast<KeyKind>(kind);
}

absl::StatusOr<ByteView> ReadKeyFile(ByteView bytes, KeyKind expected,
                                     SchemeId& scheme) {
  ByteReader in(bytes);
  PETRA_ASSIGN_OR_RETURN(KeyKind kind, ReadHeader(in, scheme));
  if (kind != expected) {
    return Error(ErrorCode::kMalformedKey, "unexpected key kind");
  }
  return in.Raw(in.remaining());
}

Bytes WriteKeyFile(SchemeId scheme, KeyKind kind, ByteView payload) {
  ByteWriter out;
  out.Raw(AsBytes(kKeyMagic))
      .U8(static_cast<uint8_t>(scheme))
      .U8(static_cast<uint8_t>(kind))
      .Raw(payload);
  return std::move(out).Take();
}

}  // namespace

std::string_view SchemeName(SchemeId scheme) {
  return scheme == SchemeId::kInsecureTest ? "insecure-test" : "bsw-type-a";
}

absl::StatusOr<SchemeId> ParseSchemeName(std::string_view name) {
  if (name == "bsw-type-a" || name == "bsw") return SchemeId::kBswTypeA;
  if (name == "insecure-test") return SchemeId::kInsecureTest;
  return Error(ErrorCode::kMalformedKey,
               "unknown scheme \"" + std::string(name) + "\"");
}

absl::StatusOr<std::pair<PublicParams, MasterKey>> AbeSetup(
    SchemeId scheme, RandomSource& rng, int security_bits) {
  if (security_bits != 128) {
    return Error(ErrorCode::kMalformedKey,
                 "only the 128-bit security level is supported");
  }
  if (scheme == SchemeId::kInsecureTest) {
    Bytes m = rng.Take(32);
    return std::make_pair(PublicParams{scheme, m}, MasterKey{scheme, m});
  }
  auto [pp, mk] = bsw::Setup(rng);
  return std::make_pair(PublicParams{scheme, bsw::EncodePublicParams(pp)},
                        MasterKey{scheme, bsw::EncodeMasterKey(mk)});
}

absl::StatusOr<AttributeSecretKey> AbeKeyGen(const PublicParams& pp,
                                             const MasterKey& mk,
                                             const AttributeSet& attributes,
                                             RandomSource& rng) {
  if (attributes.empty()) {
    return Error(ErrorCode::kEmptyAttributeSet, "key needs attributes");
  }
  if (pp.scheme != mk.scheme) {
    return Error(ErrorCode::kMalformedKey, "scheme mismatch");
  }
  for (const std::string& attr : attributes) {
    if (!policy::IsValidAttribute(attr)) {
      return Error(ErrorCode::kPolicySyntax, "invalid attribute '" + attr + "'");
    }
  }
  if (pp.scheme == SchemeId::kInsecureTest) {
    Bytes list = EncodeAttributeList(attributes);
    Digest mac = InsecureKeyMac(mk.payload, list);
    ByteWriter out;
    out.Raw(list).Raw(mac);
    return AttributeSecretKey{pp.scheme, attributes, std::move(out).Take()};
  }
  PETRA_ASSIGN_OR_RETURN(bsw::PublicParams bpp,
                         bsw::DecodePublicParams(pp.payload));
  PETRA_ASSIGN_OR_RETURN(bsw::MasterKey bmk, bsw::DecodeMasterKey(mk.payload));
  PETRA_ASSIGN_OR_RETURN(bsw::SecretKey sk,
                         bsw::KeyGen(bpp, bmk, attributes, rng));
  return AttributeSecretKey{pp.scheme, attributes, bsw::EncodeSecretKey(sk)};
}

absl::StatusOr<std::pair<SymmetricKey, PolicyKeySlot>> Encapsulate(
    const PublicParams& pp, const AccessTree& access, RandomSource& rng) {
  PETRA_RETURN_IF_ERROR(access.Validate());
  Bytes scheme_ct;
  Bytes secret;
  if (pp.scheme == SchemeId::kInsecureTest) {
    const Bytes tree = policy::EncodeAccessTree(access);
    const Bytes nonce = rng.Take(16);
    secret = rng.Take(kInsecureSecretSize);
    const Digest pad = InsecurePad(pp.payload, nonce, tree);
    Bytes masked(kInsecureSecretSize);
    for (size_t i = 0; i < masked.size(); ++i) masked[i] = secret[i] ^ pad[i];
    ByteWriter out;
    out.U8(kInsecureCtVersion).Lp(tree).Raw(nonce).Raw(masked);
    scheme_ct = std::move(out).Take();
  } else {
    PETRA_ASSIGN_OR_RETURN(bsw::PublicParams bpp,
                           bsw::DecodePublicParams(pp.payload));
    auto [ct, z] = bsw::Encapsulate(bpp, access, rng);
    scheme_ct = bsw::EncodeCiphertext(ct);
    secret = type_a::EncodeGt(z);
  }
  auto [key, confirm] = DeriveKey(secret, scheme_ct);
  ByteWriter slot_bytes;
  slot_bytes.U8(static_cast<uint8_t>(pp.scheme)).Lp(scheme_ct).Raw(confirm);
  PolicyKeySlot slot{policy::PolicyId(access), std::move(slot_bytes).Take()};
  return std::make_pair(key, std::move(slot));
}

absl::StatusOr<SymmetricKey> Decapsulate(const PublicParams& pp,
                                         const PolicyKeySlot& slot,
                                         const AttributeSecretKey& sk) {
  PETRA_ASSIGN_OR_RETURN(ParsedSlot parsed, ParseSlot(slot));
  if (parsed.scheme != pp.scheme || sk.scheme != pp.scheme) {
    return DecapFailure("scheme mismatch");
  }
  auto tree = CiphertextTree(parsed.scheme_ct);
  if (!tree.ok()) return DecapFailure("corrupt access tree in key slot");
  if (policy::PolicyId(*tree) != slot.policy_id) {
    return DecapFailure("policy id does not match encapsulated tree");
  }
  if (!policy::Satisfies(*tree, sk.attributes)) {
    return DecapFailure("attributes do not satisfy the access tree");
  }

  Bytes secret;
  if (pp.scheme == SchemeId::kInsecureTest) {
    ByteReader key_in(sk.payload);
    PETRA_ASSIGN_OR_RETURN(AttributeSet attrs, ParseAttributeList(key_in));
    auto mac = key_in.Raw(kDigestSize);
    const size_t list_size = sk.payload.size() - kDigestSize;
    if (!mac.ok() || !key_in.empty() || attrs != sk.attributes ||
        !ConstantTimeEquals(
            *mac, InsecureKeyMac(pp.payload,
                                 ByteView(sk.payload).first(list_size)))) {
      return DecapFailure("secret key rejected");
    }
    ByteReader in(parsed.scheme_ct);
    PETRA_ASSIGN_OR_RETURN(uint8_t version, in.U8());
    PETRA_ASSIGN_OR_RETURN(ByteView tree_bytes, in.Lp());
    auto nonce = in.Raw(16);
    auto masked = in.Raw(kInsecureSecretSize);
    if (version != kInsecureCtVersion || !nonce.ok() || !masked.ok() ||
        !in.empty()) {
      return DecapFailure("malformed ciphertext");
    }
    const Digest pad = InsecurePad(pp.payload, *nonce, tree_bytes);
    secret.resize(kInsecureSecretSize);
    for (size_t i = 0; i < secret.size(); ++i) secret[i] = (*masked)[i] ^ pad[i];
  } else {
    auto z = bsw::DecapsulateEncoded(parsed.scheme_ct, sk.payload);
    if (!z.ok()) {
      return HasErrorCode(z, ErrorCode::kDecapsulationFailure)
                 ? z.status()
                 : DecapFailure("malformed ciphertext or secret key");
    }
    secret = type_a::EncodeGt(*z);
  }
  auto [key, confirm] = DeriveKey(secret, parsed.scheme_ct);
  if (!ConstantTimeEquals(confirm, parsed.confirm)) {
    return DecapFailure("key confirmation mismatch");
  }
  return key;
}

absl::StatusOr<AccessTree> SlotAccessTree(const PolicyKeySlot& slot) {
  PETRA_ASSIGN_OR_RETURN(ParsedSlot parsed, ParseSlot(slot));
  return CiphertextTree(parsed.scheme_ct);
}

Bytes EncodePublicParams(const PublicParams& pp) {
  return WriteKeyFile(pp.scheme, KeyKind::kPublicParams, pp.payload);
}

Bytes EncodeMasterKey(const MasterKey& mk) {
  return WriteKeyFile(mk.scheme, KeyKind::kMasterKey, mk.payload);
}

Bytes EncodeSecretKey(const AttributeSecretKey& sk) {
  return WriteKeyFile(sk.scheme, KeyKind::kSecretKey, sk.payload);
}

absl::StatusOr<PublicParams> DecodePublicParams(ByteView bytes) {
  PublicParams pp;
  PETRA_ASSIGN_OR_RETURN(ByteView payload,
                         ReadKeyFile(bytes, KeyKind::kPublicParams, pp.scheme));
  pp.payload.assign(payload.begin(), payload.end());
  if (pp.scheme == SchemeId::kBswTypeA) {
    PETRA_RETURN_IF_ERROR(bsw::DecodePublicParams(payload).status());
  } else if (pp.payload.size() != 32) {
    return Error(ErrorCode::kMalformedKey, "bad test-scheme parameters");
  }
  return pp;
}

absl::StatusOr<MasterKey> DecodeMasterKey(ByteView bytes) {
  MasterKey mk;
  PETRA_ASSIGN_OR_RETURN(ByteView payload,
                         ReadKeyFile(bytes, KeyKind::kMasterKey, mk.scheme));
  mk.payload.assign(payload.begin(), payload.end());
  if (mk.scheme == SchemeId::kBswTypeA) {
    PETRA_RETURN_IF_ERROR(bsw::DecodeMasterKey(payload).status());
  }
  return mk;
}

absl::StatusOr<AttributeSecretKey> DecodeSecretKey(ByteView bytes) {
  AttributeSecretKey sk;
  PETRA_ASSIGN_OR_RETURN(ByteView payload,
                         ReadKeyFile(bytes, KeyKind::kSecretKey, sk.scheme));
  sk.payload.assign(payload.begin(), payload.end());
  if (sk.scheme == SchemeId::kBswTypeA) {
    PETRA_ASSIGN_OR_RETURN(bsw::SecretKey key, bsw::DecodeSecretKey(payload));
    sk.attributes = key.Attributes();
  } else {
    ByteReader in(payload);
    PETRA_ASSIGN_OR_RETURN(sk.attributes, ParseAttributeList(in));
  }
  return sk;
}

Bytes NodeCiphertext::Encode() const {
  ByteWriter out;
  out.Raw(policy_id).Raw(nonce).Raw(sealed);
  return std::move(out).Take();
}

absl::StatusOr<NodeCiphertext> NodeCiphertext::Decode(ByteView bytes) {
  if (bytes.size() < kDigestSize + kAeadNonceSize + kAeadTagSize) {
    return Error(ErrorCode::kMalformedDocument, "node ciphertext too short");
  }
  NodeCiphertext ct;
  std::memcpy(ct.policy_id.data(), bytes.data(), kDigestSize);
  std::memcpy(ct.nonce.data(), bytes.data() + kDigestSize, kAeadNonceSize);
  ct.sealed.assign(bytes.begin() + kDigestSize + kAeadNonceSize, bytes.end());
  return ct;
}

NodeCiphertext EncryptNode(const SymmetricKey& key, const Digest& policy_id,
                           ByteView salt, ByteView payload, RandomSource& rng) {
  NodeCiphertext ct;
  ct.policy_id = policy_id;
  ct.nonce = rng.Array<kAeadNonceSize>();
  ByteWriter plain;
  plain.Lp(salt).Lp(payload);
  ct.sealed = AeadSeal(key, ct.nonce, plain.bytes(), policy_id);
  return ct;
}

absl::StatusOr<NodePlaintext> DecryptNode(const SymmetricKey& key,
                                          const NodeCiphertext& ct) {
  PETRA_ASSIGN_OR_RETURN(Bytes plain,
                         AeadOpen(key, ct.nonce, ct.sealed, ct.policy_id));
  ByteReader in(plain);
  auto salt = in.Lp();
  auto payload = in.Lp();
  if (!salt.ok() || !payload.ok() || !in.empty()) {
    return Error(ErrorCode::kAuthenticationFailure, "malformed node plaintext");
  }
  return NodePlaintext{Bytes(salt->begin(), salt->end()),
                       Bytes(payload->begin(), payload->end())};
}

}  // namespace petra::abe
