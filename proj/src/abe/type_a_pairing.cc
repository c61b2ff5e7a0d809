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

#include "petra/abe/type_a_pairing.h"

#include <map>
#include <mutex>
#include <vector>

#include "petra/common/error.h"

namespace petra::abe::type_a {
namespace {

// p = h*r - 1 with r = 2^255 + 2^166 + 1 and h = 12*k for a k derived from
// SHA-256 of a fixed label; p = 3 (mod 4).
constexpr const char* kPrimeHex =
    "527bd5645d6ebe15d9e7e6f259af0e5c85ab7287db2b0fb0e0ec1b6c87cbcb7ca910e3a7"
    "a5232047b5c0a55e6aa7b79f5d8594d3c53976abaca6c2daf896ecc3fb0095320ee0c191"
    "268bd7f96e7d3631d38ecf5e262f646630f90d8e6f4b37061b935c2578d38514917ff351"
    "52c1423f1850701825a91fc815d797d7f64620692ec256d946634dcffeff1181b81b526e"
    "68d7a593ac7ca2ca707dcc17c2041d0e026bdc5f7ed334c3f8367a2fcddce983ebfaa100"
    "7739b82ed8f42aa94be3867b";
constexpr const char* kOrderHex =
    "8000000000000000000000400000000000000000000000000000000000000001";
constexpr const char* kCofactorHex =
    "a4f7aac8badd7c2bb3cfcd923788b85b9c98cf35ce6f5645fd7c090ac32ffc10d0874ebf"
    "1686c2d66be3a73022969efc3e782005fbc0a8ba1305f5812ebdde68749e2fdc6db93cde"
    "16612d5848b540344d8eefa52446cb33e14615f3b9a2dea92a84bea17329969024ce375c"
    "d1b8b35c00b7b8d39ba8fabf8cc955c81d6a19b233fdd0a941c88a70ff54db2fcddce983"
    "ebfaa1007739b82ed8f42aa94be3867c";

struct Params {
  mpz_class p{kPrimeHex, 16};
  mpz_class r{kOrderHex, 16};
  mpz_class h{kCofactorHex, 16};
  mpz_class sqrt_exp = (p + 1) / 4;
};

const Params& P() {
  static const Params* params = new Params();
  return *params;
}

// F_p arithmetic on mpz_class in place. `out` may alias inputs.
thread_local mpz_class tl_scratch;

inline void FMul(mpz_class& out, const mpz_class& a, const mpz_class& b) {
  mpz_mul(tl_scratch.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  mpz_mod(out.get_mpz_t(), tl_scratch.get_mpz_t(), P().p.get_mpz_t());
}
inline void FSqr(mpz_class& out, const mpz_class& a) { FMul(out, a, a); }
inline void FAdd(mpz_class& out, const mpz_class& a, const mpz_class& b) {
  mpz_add(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (mpz_cmp(out.get_mpz_t(), P().p.get_mpz_t()) >= 0) {
    mpz_sub(out.get_mpz_t(), out.get_mpz_t(), P().p.get_mpz_t());
  }
}
inline void FSub(mpz_class& out, const mpz_class& a, const mpz_class& b) {
  mpz_sub(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (mpz_sgn(out.get_mpz_t()) < 0) {
    mpz_add(out.get_mpz_t(), out.get_mpz_t(), P().p.get_mpz_t());
  }
}
inline void FMulSmall(mpz_class& out, const mpz_class& a, unsigned long k) {
  mpz_mul_ui(out.get_mpz_t(), a.get_mpz_t(), k);
  mpz_mod(out.get_mpz_t(), out.get_mpz_t(), P().p.get_mpz_t());
}
inline void FNeg(mpz_class& out, const mpz_class& a) {
  if (mpz_sgn(a.get_mpz_t()) == 0) {
    out = 0;
  } else {
    mpz_sub(out.get_mpz_t(), P().p.get_mpz_t(), a.get_mpz_t());
  }
}
mpz_class FInv(const mpz_class& a) {
  mpz_class out;
  mpz_invert(out.get_mpz_t(), a.get_mpz_t(), P().p.get_mpz_t());
  return out;
}
mpz_class FPow(const mpz_class& a, const mpz_class& e) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), P().p.get_mpz_t());
  return out;
}

// F_{p^2} arithmetic.
void Fp2Mul(Fp2& out, const Fp2& a, const Fp2& b) {
  mpz_class ac, bd, s1, s2;
  FMul(ac, a.re, b.re);
  FMul(bd, a.im, b.im);
  FAdd(s1, a.re, a.im);
  FAdd(s2, b.re, b.im);
  FMul(s1, s1, s2);
  FSub(s1, s1, ac);
  FSub(out.im, s1, bd);
  FSub(out.re, ac, bd);
}

void Fp2Sqr(Fp2& out, const Fp2& a) {
  mpz_class sum, diff, prod;
  FAdd(sum, a.re, a.im);
  FSub(diff, a.re, a.im);
  FMul(prod, a.re, a.im);
  FMul(out.re, sum, diff);
  FAdd(out.im, prod, prod);
}

// Squaring of a norm-1 element: re' = 2 re^2 - 1, im' = (re + im)^2 - 1.
void Fp2SqrUnitary(Fp2& out, const Fp2& a) {
  mpz_class re2, s;
  FSqr(re2, a.re);
  FAdd(s, a.re, a.im);
  FSqr(s, s);
  FAdd(re2, re2, re2);
  mpz_class one = 1;
  FSub(out.re, re2, one);
  FSub(out.im, s, one);
}

Fp2 Fp2Conj(const Fp2& a) {
  Fp2 out;
  out.re = a.re;
  FNeg(out.im, a.im);
  return out;
}

Fp2 Fp2Inv(const Fp2& a) {
  mpz_class norm, t;
  FSqr(norm, a.re);
  FSqr(t, a.im);
  FAdd(norm, norm, t);
  mpz_class inv = FInv(norm);
  Fp2 out;
  FMul(out.re, a.re, inv);
  FMul(out.im, a.im, inv);
  FNeg(out.im, out.im);
  return out;
}

Fp2 Fp2One() {
  Fp2 one;
  one.re = 1;
  one.im = 0;
  return one;
}

// Left-to-right fixed-window exponentiation; `unitary` selects the cheaper
// squaring valid for norm-1 elements.
Fp2 Fp2Pow(const Fp2& base, const mpz_class& exponent, bool unitary) {
  constexpr int kWindow = 4;
  std::vector<Fp2> table(1 << kWindow);
  table[0] = Fp2One();
  table[1] = base;
  for (int i = 2; i < (1 << kWindow); ++i) Fp2Mul(table[i], table[i - 1], base);

  Fp2 acc = Fp2One();
  const int bits = static_cast<int>(mpz_sizeinbase(exponent.get_mpz_t(), 2));
  int top = ((bits + kWindow - 1) / kWindow) * kWindow;
  for (int i = top - kWindow; i >= 0; i -= kWindow) {
    for (int s = 0; s < kWindow; ++s) {
      if (unitary) {
        Fp2SqrUnitary(acc, acc);
      } else {
        Fp2Sqr(acc, acc);
      }
    }
    unsigned digit = 0;
    for (int b = kWindow - 1; b >= 0; --b) {
      digit = (digit << 1) | mpz_tstbit(exponent.get_mpz_t(), i + b);
    }
    if (digit != 0) Fp2Mul(acc, acc, table[digit]);
  }
  return acc;
}

// Jacobian coordinates: (X, Y, Z) ~ (X/Z^2, Y/Z^3); Z == 0 is the identity.
struct Jac {
  mpz_class x, y, z;
  bool IsInfinity() const { return mpz_sgn(z.get_mpz_t()) == 0; }
};

Jac ToJac(const G1& a) {
  Jac out;
  if (a.infinity) {
    out.x = 1;
    out.y = 1;
    out.z = 0;
  } else {
    out.x = a.x;
    out.y = a.y;
    out.z = 1;
  }
  return out;
}

G1 ToAffine(const Jac& a) {
  G1 out;
  if (a.IsInfinity()) return out;
  mpz_class zinv = FInv(a.z);
  mpz_class zinv2, zinv3;
  FSqr(zinv2, zinv);
  FMul(zinv3, zinv2, zinv);
  FMul(out.x, a.x, zinv2);
  FMul(out.y, a.y, zinv3);
  out.infinity = false;
  return out;
}

// Doubling on y^2 = x^3 + x.
void JacDouble(Jac& t) {
  if (t.IsInfinity()) return;
  if (mpz_sgn(t.y.get_mpz_t()) == 0) {
    t.z = 0;
    return;
  }
  mpz_class xx, yy, yyyy, zz, s, m, tmp;
  FSqr(xx, t.x);
  FSqr(yy, t.y);
  FSqr(yyyy, yy);
  FSqr(zz, t.z);
  FMul(s, t.x, yy);
  FMulSmall(s, s, 4);
  FMulSmall(m, xx, 3);
  FSqr(tmp, zz);
  FAdd(m, m, tmp);
  // Z3 = 2 Y Z
  FMul(t.z, t.y, t.z);
  FAdd(t.z, t.z, t.z);
  // X3 = M^2 - 2S
  FSqr(tmp, m);
  FSub(tmp, tmp, s);
  FSub(t.x, tmp, s);
  // Y3 = M (S - X3) - 8 YYYY
  FSub(s, s, t.x);
  FMul(s, m, s);
  FMulSmall(yyyy, yyyy, 8);
  FSub(t.y, s, yyyy);
}

// t += q with q affine and not the identity.
void JacAddMixed(Jac& t, const G1& q) {
  if (q.infinity) return;
  if (t.IsInfinity()) {
    t = ToJac(q);
    return;
  }
  mpz_class z1z1, u2, s2, h, r, hh, hhh, v, tmp;
  FSqr(z1z1, t.z);
  FMul(u2, q.x, z1z1);
  FMul(s2, q.y, t.z);
  FMul(s2, s2, z1z1);
  FSub(h, u2, t.x);
  FSub(r, s2, t.y);
  if (mpz_sgn(h.get_mpz_t()) == 0) {
    if (mpz_sgn(r.get_mpz_t()) == 0) {
      JacDouble(t);
    } else {
      t.z = 0;
    }
    return;
  }
  FSqr(hh, h);
  FMul(hhh, h, hh);
  FMul(v, t.x, hh);
  // X3 = r^2 - HHH - 2V
  FSqr(tmp, r);
  FSub(tmp, tmp, hhh);
  FSub(tmp, tmp, v);
  FSub(tmp, tmp, v);
  // Y3 = r (V - X3) - Y1 HHH
  FSub(v, v, tmp);
  FMul(v, r, v);
  FMul(hhh, t.y, hhh);
  FSub(t.y, v, hhh);
  t.x = tmp;
  FMul(t.z, t.z, h);
}

G1 MulImpl(const G1& point, const mpz_class& k) {
  if (point.infinity || mpz_sgn(k.get_mpz_t()) == 0) return G1{};
  constexpr int kWindow = 4;
  std::vector<G1> table(1 << kWindow);
  {
    Jac acc = ToJac(point);
    table[1] = point;
    for (int i = 2; i < (1 << kWindow); ++i) {
      JacAddMixed(acc, point);
      table[i] = ToAffine(acc);
    }
  }
  Jac acc = ToJac(G1{});
  const int bits = static_cast<int>(mpz_sizeinbase(k.get_mpz_t(), 2));
  int top = ((bits + kWindow - 1) / kWindow) * kWindow;
  for (int i = top - kWindow; i >= 0; i -= kWindow) {
    for (int s = 0; s < kWindow; ++s) JacDouble(acc);
    unsigned digit = 0;
    for (int b = kWindow - 1; b >= 0; --b) {
      digit = (digit << 1) | mpz_tstbit(k.get_mpz_t(), i + b);
    }
    if (digit != 0) JacAddMixed(acc, table[digit]);
  }
  return ToAffine(acc);
}

// Miller loop f_{r,a} evaluated at the distorted image of b. Vertical-line
// factors lie in F_p and vanish under the final exponentiation, so they are
// omitted, as are all F_p scaling factors of the line functions.
Fp2 MillerLoop(const G1& a, const G1& b) {
  Fp2 f = Fp2One();
  if (a.infinity || b.infinity) return f;
  const mpz_class& r = P().r;
  const mpz_class& xq = b.x;
  const mpz_class& yq = b.y;
  Jac t = ToJac(a);
  Fp2 line;
  mpz_class xx, zz, z4, m, u, yy, tmp;
  const int bits = static_cast<int>(mpz_sizeinbase(r.get_mpz_t(), 2));
  for (int i = bits - 2; i >= 0; --i) {
    // Tangent at T: a = (3X^2 + Z^4)(Z^2 xq + X) - 2Y^2, b = 2 Y Z^3 yq.
    FSqr(xx, t.x);
    FSqr(zz, t.z);
    FSqr(z4, zz);
    FMulSmall(m, xx, 3);
    FAdd(m, m, z4);
    FMul(u, zz, xq);
    FAdd(u, u, t.x);
    FMul(line.re, m, u);
    FSqr(yy, t.y);
    FAdd(yy, yy, yy);
    FSub(line.re, line.re, yy);
    FMul(tmp, t.y, t.z);
    FMul(tmp, tmp, zz);
    FAdd(tmp, tmp, tmp);
    FMul(line.im, tmp, yq);
    Fp2Sqr(f, f);
    Fp2Mul(f, f, line);
    JacDouble(t);

    if (mpz_tstbit(r.get_mpz_t(), i)) {
      // Chord through T and A: a = R (xq + xa) - Z H ya, b = Z H yq.
      mpz_class z1z1, u2, s2, h, rr, zh;
      FSqr(z1z1, t.z);
      FMul(u2, a.x, z1z1);
      FMul(s2, a.y, t.z);
      FMul(s2, s2, z1z1);
      FSub(h, u2, t.x);
      FSub(rr, s2, t.y);
      if (mpz_sgn(h.get_mpz_t()) != 0) {
        FMul(zh, t.z, h);
        FAdd(u, xq, a.x);
        FMul(line.re, rr, u);
        FMul(tmp, zh, a.y);
        FSub(line.re, line.re, tmp);
        FMul(line.im, zh, yq);
        Fp2Mul(f, f, line);
      }
      JacAddMixed(t, a);
    }
  }
  return f;
}

// f^{(p^2 - 1)/r} = (conj(f) / f)^h.
Gt FinalExponentiation(const Fp2& f) {
  Fp2 g;
  Fp2Mul(g, Fp2Conj(f), Fp2Inv(f));
  return Gt{Fp2Pow(g, P().h, /*unitary=*/true)};
}

Bytes ExportFixed(const mpz_class& v, size_t width) {
  Bytes out(width, 0);
  size_t count = 0;
  size_t needed = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (mpz_sgn(v.get_mpz_t()) == 0 || needed > width) return out;
  mpz_export(out.data() + (width - needed), &count, 1, 1, 1, 0,
             v.get_mpz_t());
  return out;
}

mpz_class ImportBytes(ByteView bytes) {
  mpz_class v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return v;
}

// Deterministic byte stream of length n from (label, data, counter).
Bytes Expand(std::string_view label, ByteView data, uint32_t counter,
             size_t n) {
  Bytes out;
  for (uint32_t block = 0; out.size() < n; ++block) {
    ByteWriter w;
    w.Lp(label).Lp(data).U32(counter).U32(block);
    Digest d = Sha256(w.bytes());
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(n);
  return out;
}

// Returns a square root of rhs when one exists.
bool Sqrt(const mpz_class& rhs, mpz_class& root) {
  root = FPow(rhs, P().sqrt_exp);
  mpz_class check;
  FSqr(check, root);
  return check == rhs;
}

mpz_class CurveRhs(const mpz_class& x) {
  mpz_class rhs;
  FSqr(rhs, x);
  FMul(rhs, rhs, x);
  FAdd(rhs, rhs, x);
  return rhs;
}

G1 MapToSubgroup(std::string_view label, ByteView data) {
  for (uint32_t counter = 0;; ++counter) {
    Bytes stream = Expand(label, data, counter, kFieldBytes + 17);
    mpz_class x = ImportBytes(ByteView(stream).first(kFieldBytes + 16));
    mpz_mod(x.get_mpz_t(), x.get_mpz_t(), P().p.get_mpz_t());
    mpz_class y;
    if (!Sqrt(CurveRhs(x), y)) continue;
    if ((stream.back() & 1) != mpz_tstbit(y.get_mpz_t(), 0)) FNeg(y, y);
    G1 candidate{x, y, false};
    G1 point = MulImpl(candidate, P().h);
    if (!point.infinity) return point;
  }
}

}  // namespace

const mpz_class& FieldPrime() { return P().p; }
const mpz_class& GroupOrder() { return P().r; }
const mpz_class& Cofactor() { return P().h; }

mpz_class RandomScalar(RandomSource& rng) {
  Bytes buf = rng.Take(48);
  mpz_class v = ImportBytes(buf);
  mpz_class rm1 = P().r - 1;
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), rm1.get_mpz_t());
  return v + 1;
}

mpz_class ScalarMod(const mpz_class& v) {
  mpz_class out;
  mpz_mod(out.get_mpz_t(), v.get_mpz_t(), P().r.get_mpz_t());
  return out;
}

mpz_class ScalarInverse(const mpz_class& v) {
  mpz_class out;
  mpz_invert(out.get_mpz_t(), v.get_mpz_t(), P().r.get_mpz_t());
  return out;
}

G1 Add(const G1& a, const G1& b) {
  Jac t = ToJac(a);
  JacAddMixed(t, b);
  return ToAffine(t);
}

G1 Negate(const G1& a) {
  if (a.infinity) return a;
  G1 out = a;
  FNeg(out.y, a.y);
  return out;
}

G1 Mul(const G1& point, const mpz_class& scalar) {
  return MulImpl(point, ScalarMod(scalar));
}

bool IsOnCurve(const G1& point) {
  if (point.infinity) return true;
  mpz_class y2;
  FSqr(y2, point.y);
  return y2 == CurveRhs(point.x);
}

G1 HashToG1(ByteView data) {
  static std::mutex* mu = new std::mutex();
  static auto* cache = new std::map<Bytes, G1>();
  Bytes key(data.begin(), data.end());
  {
    std::lock_guard<std::mutex> lock(*mu);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
  }
  G1 point = MapToSubgroup("petra-type-a-hash-to-g1", data);
  std::lock_guard<std::mutex> lock(*mu);
  if (cache->size() > 4096) cache->clear();
  cache->emplace(std::move(key), point);
  return point;
}

G1 RandomG1(RandomSource& rng) {
  Bytes seed = rng.Take(32);
  return MapToSubgroup("petra-type-a-random-g1", seed);
}

Gt Pair(const G1& a, const G1& b) {
  return FinalExponentiation(MillerLoop(a, b));
}

Gt MultiPair(std::span<const PairingTerm> terms) {
  Fp2 acc = Fp2One();
  for (const PairingTerm& term : terms) {
    Fp2 f = MillerLoop(*term.a, *term.b);
    mpz_class e = ScalarMod(term.exponent);
    if (e != 1) f = Fp2Pow(f, e, /*unitary=*/false);
    Fp2Mul(acc, acc, f);
  }
  return FinalExponentiation(acc);
}

Gt GtOne() { return Gt{Fp2One()}; }

Gt GtMul(const Gt& a, const Gt& b) {
  Gt out;
  Fp2Mul(out.value, a.value, b.value);
  return out;
}

Gt GtInverse(const Gt& a) { return Gt{Fp2Conj(a.value)}; }

Gt GtPow(const Gt& a, const mpz_class& exponent) {
  return Gt{Fp2Pow(a.value, ScalarMod(exponent), /*unitary=*/true)};
}

Bytes EncodeScalar(const mpz_class& v) {
  return ExportFixed(ScalarMod(v), kScalarBytes);
}

absl::StatusOr<mpz_class> DecodeScalar(ByteView bytes) {
  if (bytes.size() != kScalarBytes) {
    return Error(ErrorCode::kMalformedKey, "scalar must be 32 bytes");
  }
  mpz_class v = ImportBytes(bytes);
  if (v >= P().r) return Error(ErrorCode::kMalformedKey, "scalar out of range");
  return v;
}

Bytes EncodeG1(const G1& point) {
  if (point.infinity) return Bytes{0x00};
  Bytes out;
  out.reserve(kG1Bytes);
  out.push_back(mpz_tstbit(point.y.get_mpz_t(), 0) ? 0x03 : 0x02);
  Bytes x = ExportFixed(point.x, kFieldBytes);
  out.insert(out.end(), x.begin(), x.end());
  return out;
}

absl::StatusOr<G1> DecodeG1(ByteView bytes) {
  if (bytes.size() == 1 && bytes[0] == 0x00) return G1{};
  if (bytes.size() != kG1Bytes || (bytes[0] != 0x02 && bytes[0] != 0x03)) {
    return Error(ErrorCode::kMalformedKey, "bad G1 encoding");
  }
  mpz_class x = ImportBytes(bytes.subspan(1));
  if (x >= P().p) return Error(ErrorCode::kMalformedKey, "G1 x out of range");
  mpz_class y;
  if (!Sqrt(CurveRhs(x), y)) {
    return Error(ErrorCode::kMalformedKey, "G1 point not on curve");
  }
  if (static_cast<int>(mpz_tstbit(y.get_mpz_t(), 0)) != (bytes[0] & 1)) {
    FNeg(y, y);
  }
  G1 point{x, y, false};
  if (!MulImpl(point, P().r).infinity) {
    return Error(ErrorCode::kMalformedKey, "G1 point outside subgroup");
  }
  return point;
}

Bytes EncodeGt(const Gt& element) {
  Bytes out = ExportFixed(element.value.re, kFieldBytes);
  Bytes im = ExportFixed(element.value.im, kFieldBytes);
  out.insert(out.end(), im.begin(), im.end());
  return out;
}

absl::StatusOr<Gt> DecodeGt(ByteView bytes) {
  if (bytes.size() != kGtBytes) {
    return Error(ErrorCode::kMalformedKey, "bad GT encoding");
  }
  Gt out;
  out.value.re = ImportBytes(bytes.first(kFieldBytes));
  out.value.im = ImportBytes(bytes.subspan(kFieldBytes));
  if (out.value.re >= P().p || out.value.im >= P().p) {
    return Error(ErrorCode::kMalformedKey, "GT coordinate out of range");
  }
  if (!(Gt{Fp2Pow(out.value, P().r, /*unitary=*/false)} == GtOne())) {
    return Error(ErrorCode::kMalformedKey, "GT element outside subgroup");
  }
  return out;
}

}  // namespace petra::abe::type_a
