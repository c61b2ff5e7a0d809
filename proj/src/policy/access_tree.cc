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

#include "petra/policy/access_tree.h"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <optional>
#include <utility>

#include "petra/common/error.h"

namespace petra::policy {
namespace {

bool IsNamespaceChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '.' || c == '-';
}

bool IsValueChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '@' || c == '-';
}

bool IsTokenChar(char c) { return IsValueChar(c) || c == ':'; }

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

enum class TokenKind { kWord, kLParen, kRParen, kComma, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  size_t pos;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  absl::StatusOr<AccessTree> Parse() {
    PETRA_RETURN_IF_ERROR(Tokenize());
    PETRA_ASSIGN_OR_RETURN(AccessTree tree, ParseExpr());
    if (Peek().kind != TokenKind::kEnd) {
      return Syntax("unexpected trailing input", Peek().pos);
    }
    PETRA_RETURN_IF_ERROR(tree.Validate());
    return tree;
  }

 private:
  absl::Status Syntax(std::string_view what, size_t pos) const {
    return Error(ErrorCode::kPolicySyntax,
                 std::string(what) + " at offset " + std::to_string(pos) +
                     " in \"" + std::string(text_) + "\"");
  }

  absl::Status Tokenize() {
    size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '(') {
        tokens_.push_back({TokenKind::kLParen, "(", i++});
      } else if (c == ')') {
        tokens_.push_back({TokenKind::kRParen, ")", i++});
      } else if (c == ',') {
        tokens_.push_back({TokenKind::kComma, ",", i++});
      } else if (IsTokenChar(c)) {
        size_t start = i;
        while (i < text_.size() && IsTokenChar(text_[i])) ++i;
        tokens_.push_back(
            {TokenKind::kWord, std::string(text_.substr(start, i - start)),
             start});
      } else {
        return Syntax(std::string("unexpected character '") + c + "'", i);
      }
    }
    tokens_.push_back({TokenKind::kEnd, "", text_.size()});
    return absl::OkStatus();
  }

  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Next() { return tokens_[pos_++]; }

  bool PeekKeyword(std::string_view keyword) const {
    return Peek().kind == TokenKind::kWord &&
           EqualsIgnoreCase(Peek().text, keyword);
  }

  absl::StatusOr<AccessTree> ParseExpr() {
    std::vector<AccessTree> terms;
    PETRA_ASSIGN_OR_RETURN(AccessTree first, ParseTerm());
    terms.push_back(std::move(first));
    while (PeekKeyword("or")) {
      Next();
      PETRA_ASSIGN_OR_RETURN(AccessTree next, ParseTerm());
      terms.push_back(std::move(next));
    }
    if (terms.size() == 1) return std::move(terms.front());
    return AccessTree::Or(std::move(terms));
  }

  absl::StatusOr<AccessTree> ParseTerm() {
    std::vector<AccessTree> factors;
    PETRA_ASSIGN_OR_RETURN(AccessTree first, ParseFactor());
    factors.push_back(std::move(first));
    while (PeekKeyword("and")) {
      Next();
      PETRA_ASSIGN_OR_RETURN(AccessTree next, ParseFactor());
      factors.push_back(std::move(next));
    }
    if (factors.size() == 1) return std::move(factors.front());
    return AccessTree::And(std::move(factors));
  }

  // Recognizes "2of" or "2 of" and returns k.
  std::optional<int> TryThreshold() {
    if (Peek().kind != TokenKind::kWord) return std::nullopt;
    const std::string& word = Peek().text;
    size_t digits = 0;
    while (digits < word.size() &&
           std::isdigit(static_cast<unsigned char>(word[digits]))) {
      ++digits;
    }
    if (digits == 0 || digits > 6) return std::nullopt;
    int k = std::stoi(word.substr(0, digits));
    std::string_view rest = std::string_view(word).substr(digits);
    if (EqualsIgnoreCase(rest, "of")) {
      Next();
      return k;
    }
    if (rest.empty() && pos_ + 1 < tokens_.size() &&
        tokens_[pos_ + 1].kind == TokenKind::kWord &&
        EqualsIgnoreCase(tokens_[pos_ + 1].text, "of")) {
      Next();
      Next();
      return k;
    }
    return std::nullopt;
  }

  absl::StatusOr<AccessTree> ParseFactor() {
    const Token& tok = Peek();
    if (tok.kind == TokenKind::kLParen) {
      Next();
      PETRA_ASSIGN_OR_RETURN(AccessTree inner, ParseExpr());
      if (Next().kind != TokenKind::kRParen) {
        return Syntax("expected ')'", tok.pos);
      }
      return inner;
    }
    if (std::optional<int> k = TryThreshold()) {
      size_t gate_pos = tok.pos;
      if (Next().kind != TokenKind::kLParen) {
        return Syntax("expected '(' after threshold", gate_pos);
      }
      std::vector<AccessTree> children;
      if (Peek().kind == TokenKind::kRParen) {
        return Error(ErrorCode::kEmptyGate,
                     "threshold gate without children at offset " +
                         std::to_string(gate_pos));
      }
      while (true) {
        PETRA_ASSIGN_OR_RETURN(AccessTree child, ParseExpr());
        children.push_back(std::move(child));
        const Token& sep = Next();
        if (sep.kind == TokenKind::kRParen) break;
        if (sep.kind != TokenKind::kComma) {
          return Syntax("expected ',' or ')'", sep.pos);
        }
      }
      if (*k < 1 || *k > static_cast<int>(children.size())) {
        return Error(ErrorCode::kBadThreshold,
                     std::to_string(*k) + "of over " +
                         std::to_string(children.size()) + " children");
      }
      return AccessTree::Gate(*k, std::move(children));
    }
    if (tok.kind == TokenKind::kWord) {
      if (EqualsIgnoreCase(tok.text, "and") || EqualsIgnoreCase(tok.text, "or")) {
        return Syntax("operator without operand", tok.pos);
      }
      if (!IsValidAttribute(tok.text)) {
        return Syntax("invalid attribute '" + tok.text + "'", tok.pos);
      }
      Next();
      return AccessTree::Leaf(tok.text);
    }
    if (tok.kind == TokenKind::kEnd) {
      return Syntax("unexpected end of expression", tok.pos);
    }
    return Syntax("unexpected '" + tok.text + "'", tok.pos);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

void Encode(const AccessTree& tree, ByteWriter& out) {
  if (tree.is_leaf()) {
    out.U8(0x01).Lp(tree.attribute());
    return;
  }
  out.U8(0x02)
      .U32(static_cast<uint32_t>(tree.threshold()))
      .U32(static_cast<uint32_t>(tree.children().size()));
  for (const AccessTree& child : tree.children()) Encode(child, out);
}

absl::StatusOr<AccessTree> Decode(ByteReader& in, int depth) {
  if (depth > 64) {
    return Error(ErrorCode::kPolicySyntax, "access tree nested too deeply");
  }
  PETRA_ASSIGN_OR_RETURN(uint8_t tag, in.U8());
  if (tag == 0x01) {
    PETRA_ASSIGN_OR_RETURN(std::string attr, in.LpString());
    if (!IsValidAttribute(attr)) {
      return Error(ErrorCode::kPolicySyntax, "invalid attribute in encoding");
    }
    return AccessTree::Leaf(std::move(attr));
  }
  if (tag != 0x02) {
    return Error(ErrorCode::kPolicySyntax, "unknown access tree tag");
  }
  PETRA_ASSIGN_OR_RETURN(uint32_t k, in.U32());
  PETRA_ASSIGN_OR_RETURN(uint32_t n, in.U32());
  if (n == 0) return Error(ErrorCode::kEmptyGate, "gate without children");
  if (k < 1 || k > n) return Error(ErrorCode::kBadThreshold, "bad threshold");
  if (n > in.remaining()) {
    return Error(ErrorCode::kPolicySyntax, "truncated access tree");
  }
  std::vector<AccessTree> children;
  children.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    PETRA_ASSIGN_OR_RETURN(AccessTree child, Decode(in, depth + 1));
    children.push_back(std::move(child));
  }
  return AccessTree::Gate(static_cast<int>(k), std::move(children));
}

bool SatisfiesImpl(const AccessTree& tree, const AttributeSet& attributes) {
  if (tree.is_leaf()) return attributes.contains(tree.attribute());
  int satisfied = 0;
  for (const AccessTree& child : tree.children()) {
    if (SatisfiesImpl(child, attributes) && ++satisfied >= tree.threshold()) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool IsValidAttribute(std::string_view attribute) {
  size_t colon = attribute.find(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == attribute.size()) {
    return false;
  }
  for (size_t i = 0; i < colon; ++i) {
    if (!IsNamespaceChar(attribute[i])) return false;
  }
  for (size_t i = colon + 1; i < attribute.size(); ++i) {
    if (!IsValueChar(attribute[i])) return false;
  }
  return true;
}

absl::StatusOr<YearMonth> YearMonth::Parse(std::string_view text) {
  int year = 0, month = 0;
  char trailing = 0;
  if (text.size() != 7 || text[4] != '-' ||
      std::sscanf(std::string(text).c_str(), "%4d-%2d%c", &year, &month,
                  &trailing) != 2 ||
      month < 1 || month > 12) {
    return Error(ErrorCode::kPolicySyntax,
                 "expected YYYY-MM, got \"" + std::string(text) + "\"");
  }
  return YearMonth{year, month};
}

YearMonth YearMonth::FromUnixSeconds(int64_t seconds) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds(std::chrono::seconds(seconds)));
  const year_month_day ymd(day);
  return YearMonth{static_cast<int>(ymd.year()),
                   static_cast<int>(static_cast<unsigned>(ymd.month()))};
}

YearMonth YearMonth::Now() {
  using namespace std::chrono;
  return FromUnixSeconds(
      duration_cast<seconds>(system_clock::now().time_since_epoch()).count());
}

std::string YearMonth::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::Next() const {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

AccessTree AccessTree::Leaf(std::string attribute) {
  AccessTree tree;
  tree.attribute_ = std::move(attribute);
  return tree;
}

AccessTree AccessTree::Gate(int threshold, std::vector<AccessTree> children) {
  AccessTree tree;
  tree.threshold_ = threshold;
  tree.children_ = std::move(children);
  return tree;
}

AccessTree AccessTree::And(std::vector<AccessTree> children) {
  int n = static_cast<int>(children.size());
  return Gate(n, std::move(children));
}

AccessTree AccessTree::Or(std::vector<AccessTree> children) {
  return Gate(1, std::move(children));
}

size_t AccessTree::LeafCount() const {
  if (is_leaf()) return 1;
  size_t count = 0;
  for (const AccessTree& child : children_) count += child.LeafCount();
  return count;
}

absl::Status AccessTree::Validate() const {
  if (is_leaf()) {
    if (!IsValidAttribute(attribute_)) {
      return Error(ErrorCode::kPolicySyntax,
                   "invalid attribute '" + attribute_ + "'");
    }
    return absl::OkStatus();
  }
  if (children_.empty()) {
    return Error(ErrorCode::kEmptyGate, "gate without children");
  }
  if (threshold_ < 1 || threshold_ > static_cast<int>(children_.size())) {
    return Error(ErrorCode::kBadThreshold,
                 "threshold " + std::to_string(threshold_) + " over " +
                     std::to_string(children_.size()) + " children");
  }
  for (const AccessTree& child : children_) {
    PETRA_RETURN_IF_ERROR(child.Validate());
  }
  return absl::OkStatus();
}

absl::StatusOr<AccessTree> ParseAccessExpression(std::string_view text) {
  return Parser(text).Parse();
}

std::string ToExpression(const AccessTree& tree) {
  if (tree.is_leaf()) return tree.attribute();
  const size_t n = tree.children().size();
  std::string sep;
  std::string out;
  if (tree.threshold() == static_cast<int>(n) && n > 1) {
    sep = " AND ";
    out = "(";
  } else if (tree.threshold() == 1 && n > 1) {
    sep = " OR ";
    out = "(";
  } else {
    sep = ", ";
    out = std::to_string(tree.threshold()) + "of(";
  }
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) out += sep;
    out += ToExpression(tree.children()[i]);
  }
  return out + ")";
}

Bytes EncodeAccessTree(const AccessTree& tree) {
  ByteWriter out;
  Encode(tree, out);
  return std::move(out).Take();
}

absl::StatusOr<AccessTree> DecodeAccessTree(ByteReader& reader) {
  return Decode(reader, 0);
}

absl::StatusOr<AccessTree> DecodeAccessTree(ByteView bytes) {
  ByteReader reader(bytes);
  PETRA_ASSIGN_OR_RETURN(AccessTree tree, Decode(reader, 0));
  if (!reader.empty()) {
    return Error(ErrorCode::kPolicySyntax, "trailing bytes after access tree");
  }
  return tree;
}

Digest PolicyId(const AccessTree& tree) {
  return Sha256(EncodeAccessTree(tree));
}

bool Satisfies(const AccessTree& tree, const AttributeSet& attributes) {
  return SatisfiesImpl(tree, attributes);
}

bool Satisfies(const AccessTree& tree, const AttributeSet& attributes,
               YearMonth now) {
  AttributeSet live;
  for (const std::string& attr : attributes) {
    if (attr.starts_with("expiry:")) {
      absl::StatusOr<YearMonth> window = YearMonth::Parse(attr.substr(7));
      if (!window.ok() || *window < now) continue;
    }
    live.insert(attr);
  }
  return SatisfiesImpl(tree, live);
}

}  // namespace petra::policy
