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

#ifndef PETRA_COMMON_BYTES_H_
#define PETRA_COMMON_BYTES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace petra {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}
inline Bytes ToBytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}
inline std::string ToString(ByteView b) {
  return std::string(b.begin(), b.end());
}

std::string HexEncode(ByteView data);
absl::StatusOr<Bytes> HexDecode(std::string_view hex);

std::string Base64Encode(ByteView data);
absl::StatusOr<Bytes> Base64Decode(std::string_view text);

// Canonical encoder. Every byte string is preceded by its length as a 4-byte
// big-endian integer so that concatenations are unambiguous.
class ByteWriter {
 public:
  ByteWriter() = default;

  ByteWriter& U8(uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  ByteWriter& U32(uint32_t v);
  ByteWriter& Raw(ByteView data) {
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }
  // Length-prefixed byte string.
  ByteWriter& Lp(ByteView data) {
    U32(static_cast<uint32_t>(data.size()));
    return Raw(data);
  }
  ByteWriter& Lp(std::string_view s) { return Lp(AsBytes(s)); }

  const Bytes& bytes() const& { return out_; }
  Bytes&& Take() && { return std::move(out_); }
  size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

// Cursor over a canonical encoding; every read is bounds-checked.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  absl::StatusOr<uint8_t> U8();
  absl::StatusOr<uint32_t> U32();
  absl::StatusOr<ByteView> Raw(size_t n);
  absl::StatusOr<ByteView> Lp();
  absl::StatusOr<std::string> LpString();

  bool empty() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  ByteView data_;
  size_t pos_ = 0;
};

// Constant-time comparison for secrets and MACs.
bool ConstantTimeEquals(ByteView a, ByteView b);

}  // namespace petra

#endif  // PETRA_COMMON_BYTES_H_
