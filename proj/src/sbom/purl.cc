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

#include "petra/sbom/purl.h"

#include <cctype>

#include "petra/common/error.h"

namespace petra::sbom {
namespace {

bool IsUnreserved(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
         c == '_' || c == '~';
}

// Characters allowed (already encoded) inside a name/namespace/version.
bool IsSegmentChar(char c) {
  return IsUnreserved(c) || c == '%' || c == '+' || c == '!' || c == '$' ||
         c == '&' || c == '\'' || c == '(' || c == ')' || c == '*' ||
         c == ',' || c == ';' || c == '=' || c == ':';
}

bool ValidEscapes(std::string_view s) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') continue;
    if (i + 2 >= s.size() ||
        !std::isxdigit(static_cast<unsigned char>(s[i + 1])) ||
        !std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      return false;
    }
  }
  return true;
}

bool ValidSegment(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!IsSegmentChar(c)) return false;
  }
  return ValidEscapes(s);
}

absl::Status Invalid(std::string_view text, std::string_view why) {
  return Error(ErrorCode::kMissingIndex,
               "invalid pURL \"" + std::string(text) + "\": " + std::string(why));
}

}  // namespace

std::string Purl::ToString() const {
  std::string out = "pkg:" + type + "/";
  if (!name_space.empty()) out += name_space + "/";
  out += name;
  if (!version.empty()) out += "@" + version;
  if (!qualifiers.empty()) out += "?" + qualifiers;
  if (!subpath.empty()) out += "#" + subpath;
  return out;
}

absl::StatusOr<Purl> ParsePurl(std::string_view text) {
  if (!text.starts_with("pkg:")) return Invalid(text, "missing pkg: scheme");
  std::string_view rest = text.substr(4);
  while (rest.starts_with("/")) rest.remove_prefix(1);
  Purl purl;
  if (size_t hash = rest.find('#'); hash != std::string_view::npos) {
    purl.subpath = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (size_t q = rest.find('?'); q != std::string_view::npos) {
    purl.qualifiers = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
    if (purl.qualifiers.empty()) return Invalid(text, "empty qualifiers");
  }
  size_t slash = rest.find('/');
  if (slash == std::string_view::npos) return Invalid(text, "missing name");
  std::string_view type = rest.substr(0, slash);
  rest = rest.substr(slash + 1);
  if (type.empty() || !std::isalpha(static_cast<unsigned char>(type[0]))) {
    return Invalid(text, "bad type");
  }
  for (char c : type) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '+' &&
        c != '-') {
      return Invalid(text, "bad type");
    }
  }
  purl.type = std::string(type);
  // The version separator is the last '@' after the final '/'.
  size_t last_slash = rest.rfind('/');
  size_t at = rest.rfind('@');
  if (at != std::string_view::npos &&
      (last_slash == std::string_view::npos || at > last_slash)) {
    purl.version = std::string(rest.substr(at + 1));
    rest = rest.substr(0, at);
    if (!ValidSegment(purl.version)) return Invalid(text, "bad version");
  }
  while (rest.ends_with("/")) rest.remove_suffix(1);
  last_slash = rest.rfind('/');
  if (last_slash != std::string_view::npos) {
    purl.name_space = std::string(rest.substr(0, last_slash));
    rest = rest.substr(last_slash + 1);
    size_t start = 0;
    std::string_view ns = purl.name_space;
    while (start <= ns.size()) {
      size_t end = ns.find('/', start);
      if (end == std::string_view::npos) end = ns.size();
      if (!ValidSegment(ns.substr(start, end - start))) {
        return Invalid(text, "bad namespace");
      }
      start = end + 1;
    }
  }
  if (!ValidSegment(rest)) return Invalid(text, "bad name");
  purl.name = std::string(rest);
  return purl;
}

bool IsValidPurl(std::string_view text) { return ParsePurl(text).ok(); }

std::string PurlEncode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : text) {
    if (IsUnreserved(c)) {
      out.push_back(c);
    } else {
      const auto b = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 0xf]);
    }
  }
  return out;
}

std::string GenericPurl(std::string_view name, std::string_view version) {
  return "pkg:generic/" + PurlEncode(name) + "@" +
         (version.empty() ? std::string("0") : PurlEncode(version));
}

}  // namespace petra::sbom
