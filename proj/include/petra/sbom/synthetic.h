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

// Deterministic synthetic SBOM documents for tests and benchmarks.

#ifndef PETRA_SBOM_SYNTHETIC_H_
#define PETRA_SBOM_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

namespace petra::sbom {

// SPDX 2.3 JSON with `packages` packages, a DESCRIBES relationship and a
// DEPENDS_ON chain.
std::string SyntheticSpdx(int packages, uint64_t seed);

// CycloneDX 1.5 JSON with `components` components, dependencies and a few
// vulnerabilities.
std::string SyntheticCycloneDx(int components, uint64_t seed);

struct CorpusFile {
  std::string name;  // e.g. "synthetic-03.spdx.json"
  std::string content;
};

// `count` documents alternating SPDX / CycloneDX with package counts spread
// over [min_packages, max_packages].
std::vector<CorpusFile> SyntheticCorpus(int count, int min_packages,
                                        int max_packages, uint64_t seed);

}  // namespace petra::sbom

#endif  // PETRA_SBOM_SYNTHETIC_H_
