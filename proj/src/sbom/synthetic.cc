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

#include "petra/sbom/synthetic.h"

#include <array>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

namespace petra::sbom {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<const char*, 8> kLicenses = {
    "MIT",        "Apache-2.0",       "BSD-3-Clause", "GPL-2.0-only",
    "ISC",        "GPL-3.0-or-later", "MPL-2.0",      "LGPL-2.1-or-later"};
constexpr std::array<const char*, 6> kEcosystems = {"npm",   "pypi", "maven",
                                                    "golang", "cargo", "gem"};
constexpr std::array<const char*, 10> kSyllables = {
    "lib", "core", "net", "json", "xml", "log", "http", "crypt", "zip", "util"};

struct Gen {
  explicit Gen(uint64_t seed) : rng(seed) {}

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  std::string Hex(int n) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < n; ++i) out.push_back(kHex[Uniform(0, 15)]);
    return out;
  }
  std::string Name(int i) {
    std::string out = kSyllables[Uniform(0, 9)];
    out += "-";
    out += kSyllables[Uniform(0, 9)];
    return out + std::to_string(i);
  }
  std::string Version() {
    return std::to_string(Uniform(0, 9)) + "." + std::to_string(Uniform(0, 30)) +
           "." + std::to_string(Uniform(0, 12));
  }
  const char* License() { return kLicenses[Uniform(0, kLicenses.size() - 1)]; }
  const char* Ecosystem() {
    return kEcosystems[Uniform(0, kEcosystems.size() - 1)];
  }

  std::mt19937_64 rng;
};

}  // namespace

std::string SyntheticSpdx(int packages, uint64_t seed) {
  Gen gen(seed);
  const std::string doc_name = "synthetic-app-" + std::to_string(seed);
  Json doc;
  doc["spdxVersion"] = "SPDX-2.3";
  doc["dataLicense"] = "CC0-1.0";
  doc["SPDXID"] = "SPDXRef-DOCUMENT";
  doc["name"] = doc_name;
  doc["documentNamespace"] =
      "https://example.com/spdx/" + doc_name + "-" + gen.Hex(8);
  doc["creationInfo"] = {{"created", "2024-05-01T12:00:00Z"},
                         {"creators", {"Tool: petra-synthetic-1.0",
                                       "Organization: Example Corp"}}};
  doc["documentDescribes"] = {"SPDXRef-Package-0"};
  Json pkgs = Json::array();
  Json rels = Json::array();
  rels.push_back({{"spdxElementId", "SPDXRef-DOCUMENT"},
                  {"relationshipType", "DESCRIBES"},
                  {"relatedSpdxElement", "SPDXRef-Package-0"}});
  for (int i = 0; i < packages; ++i) {
    const std::string name = i == 0 ? doc_name : gen.Name(i);
    const std::string version = gen.Version();
    const std::string eco = gen.Ecosystem();
    const char* license = gen.License();
    Json pkg;
    pkg["name"] = name;
    pkg["SPDXID"] = "SPDXRef-Package-" + std::to_string(i);
    pkg["versionInfo"] = version;
    pkg["supplier"] = "Organization: " + name + " maintainers";
    pkg["downloadLocation"] =
        "https://registry.example.com/" + eco + "/" + name + "-" + version + ".tgz";
    pkg["filesAnalyzed"] = false;
    pkg["licenseConcluded"] = license;
    pkg["licenseDeclared"] = license;
    pkg["copyrightText"] = "NOASSERTION";
    pkg["checksums"] = {{{"algorithm", "SHA256"}, {"checksumValue", gen.Hex(64)}}};
    pkg["externalRefs"] = {
        {{"referenceCategory", "PACKAGE-MANAGER"},
         {"referenceType", "purl"},
         {"referenceLocator", "pkg:" + eco + "/" + name + "@" + version}}};
    pkgs.push_back(std::move(pkg));
    if (i > 0) {
      rels.push_back(
          {{"spdxElementId", "SPDXRef-Package-" + std::to_string(gen.Uniform(0, i - 1))},
           {"relationshipType", "DEPENDS_ON"},
           {"relatedSpdxElement", "SPDXRef-Package-" + std::to_string(i)}});
    }
  }
  doc["packages"] = std::move(pkgs);
  doc["relationships"] = std::move(rels);
  return doc.dump(2) + "\n";
}

std::string SyntheticCycloneDx(int components, uint64_t seed) {
  Gen gen(seed);
  const std::string app = "synthetic-service-" + std::to_string(seed);
  Json doc;
  doc["bomFormat"] = "CycloneDX";
  doc["specVersion"] = "1.5";
  doc["serialNumber"] = "urn:uuid:" + gen.Hex(8) + "-" + gen.Hex(4) + "-4" +
                        gen.Hex(3) + "-a" + gen.Hex(3) + "-" + gen.Hex(12);
  doc["version"] = 1;
  const std::string app_version = gen.Version();
  doc["metadata"] = {
      {"timestamp", "2024-05-01T12:00:00Z"},
      {"tools", {{{"vendor", "Example Corp"}, {"name", "petra-synthetic"},
                  {"version", "1.0"}}}},
      {"component",
       {{"type", "application"},
        {"bom-ref", "app"},
        {"name", app},
        {"version", app_version},
        {"purl", "pkg:generic/" + app + "@" + app_version}}}};
  Json comps = Json::array();
  Json deps = Json::array();
  Json vulns = Json::array();
  std::vector<std::string> refs;
  for (int i = 0; i < components; ++i) {
    const std::string name = gen.Name(i);
    const std::string version = gen.Version();
    const std::string eco = gen.Ecosystem();
    const std::string ref = "pkg:" + eco + "/" + name + "@" + version;
    Json c;
    c["type"] = "library";
    c["bom-ref"] = ref;
    c["supplier"] = {{"name", name + " maintainers"}};
    c["name"] = name;
    c["version"] = version;
    c["licenses"] = {{{"license", {{"id", gen.License()}}}}};
    c["hashes"] = {{{"alg", "SHA-256"}, {"content", gen.Hex(64)}}};
    c["purl"] = ref;
    comps.push_back(std::move(c));
    refs.push_back(ref);
    if (gen.Uniform(0, 9) == 0) {
      Json v;
      v["id"] = "CVE-20" + std::to_string(gen.Uniform(18, 24)) + "-" +
                std::to_string(gen.Uniform(1000, 49999));
      v["source"] = {{"name", "NVD"}, {"url", "https://nvd.nist.gov/"}};
      v["ratings"] = {{{"score", gen.Uniform(10, 99) / 10.0},
                       {"severity", gen.Uniform(0, 1) ? "high" : "medium"},
                       {"method", "CVSSv31"}}};
      v["description"] = "Synthetic weakness in " + name;
      v["affects"] = {{{"ref", ref}}};
      vulns.push_back(std::move(v));
    }
  }
  Json app_dep = {{"ref", "app"}, {"dependsOn", Json::array()}};
  for (size_t i = 0; i < refs.size(); ++i) {
    if (i % 3 == 0) app_dep["dependsOn"].push_back(refs[i]);
  }
  deps.push_back(std::move(app_dep));
  for (size_t i = 1; i < refs.size(); ++i) {
    if (i % 3 != 0) {
      deps.push_back({{"ref", refs[i - 1]}, {"dependsOn", {refs[i]}}});
    }
  }
  doc["components"] = std::move(comps);
  doc["dependencies"] = std::move(deps);
  if (!vulns.empty()) doc["vulnerabilities"] = std::move(vulns);
  return doc.dump(2) + "\n";
}

std::vector<CorpusFile> SyntheticCorpus(int count, int min_packages,
                                        int max_packages, uint64_t seed) {
  std::vector<CorpusFile> out;
  for (int i = 0; i < count; ++i) {
    const int packages =
        count == 1 ? min_packages
                   : min_packages + (max_packages - min_packages) * i / (count - 1);
    char name[64];
    const bool spdx = i % 2 == 0;
    std::snprintf(name, sizeof(name), "synthetic-%02d.%s.json", i,
                  spdx ? "spdx" : "cdx");
    out.push_back({name, spdx ? SyntheticSpdx(packages, seed + i)
                              : SyntheticCycloneDx(packages, seed + i)});
  }
  return out;
}

}  // namespace petra::sbom
