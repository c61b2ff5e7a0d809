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

#include "petra/common/bytes.h"

#include <openssl/crypto.h>

#include "absl/strings/ascii.h"
#include "absl/strings/escaping.h"
#include "petra/common/error.h"

namespace petra {

std::string HexEncode(ByteView data) {
  return absl::BytesToHexString(
      absl::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

absl::StatusOr<Bytes> HexDecode(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    return Error(ErrorCode::kMalformedDocument, "odd-length hex string");
  }
  for (char c : hex) {
    if (!absl::ascii_isxdigit(static_cast<unsigned char>(c))) {
      return Error(ErrorCode::kMalformedDocument, "invalid hex digit");
    }
  }
  return ToBytes(absl::HexStringToBytes(absl::string_view(hex.data(), hex.size())));
}

std::string Base64Encode(ByteView data) {
  return absl::Base64Escape(
      absl::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

absl::StatusOr<Bytes> Base64Decode(std::string_view text) {
  std::string out;
  if (!absl::Base64Unescape(absl::string_view(text.data(), text.size()), &out)) {
    return Error(ErrorCode::kMalformedDocument, "invalid base64");
  }
  return ToBytes(out);
}

ByteWriter& ByteWriter::U32(uint32_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 24));
  out_.push_back(static_cast<uint8_t>(v >> 16));
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
  return *this;
}

absl::StatusOr<uint8_t> ByteReader::U8() {
  if (remaining() < 1) {
    return Error(ErrorCode::kMalformedDocument, "truncated encoding");
  }
  return data_[pos_++];
}

absl::StatusOr<uint32_t> ByteReader::U32() {
  if (remaining() < 4) {
    return Error(ErrorCode::kMalformedDocument, "truncated encoding");
  }
  uint32_t v = (uint32_t{data_[pos_]} << 24) | (uint32_t{data_[pos_ + 1]} << 16) |
               (uint32_t{data_[pos_ + 2]} << 8) | uint32_t{data_[pos_ + 3]};
  pos_ += 4;
  return v;
}

absl::StatusOr<ByteView> ByteReader::Raw(size_t n) {
  if (remaining() < n) {
    return Error(ErrorCode::kMalformedDocument, "truncated encoding");
  }
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

absl::StatusOr<ByteView> ByteReader::Lp() {
  PETRA_ASSIGN_OR_RETURN(uint32_t n, U32());
  return Raw(n);
}

absl::StatusOr<std::string> ByteReader::LpString() {
  PETRA_ASSIGN_OR_RETURN(ByteView v, Lp());
  return ToString(v);
}

bool ConstantTimeEquals(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace petra
