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

#ifndef PETRA_SBOM_PURL_H_
#define PETRA_SBOM_PURL_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace petra::sbom {

// pkg:type/namespace/name@version?qualifiers#subpath. Components are kept in
// their encoded form.
struct Purl {
  std::string type;
  std::string name_space;  // may be empty; '/'-separated segments
  std::string name;
  std::string version;     // may be empty
  std::string qualifiers;  // may be empty
  std::string subpath;     // may be empty

  std::string ToString() const;
};

absl::StatusOr<Purl> ParsePurl(std::string_view text);
bool IsValidPurl(std::string_view text);

// Percent-encodes everything outside [A-Za-z0-9.-_~].
std::string PurlEncode(std::string_view text);

// pkg:generic/<encoded name>@<version or "0">
std::string GenericPurl(std::string_view name, std::string_view version);

}  // namespace petra::sbom

#endif  // PETRA_SBOM_PURL_H_
