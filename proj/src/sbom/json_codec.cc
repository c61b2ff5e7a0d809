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

// JSON <-> tree mapping for SPDX and CycloneDX.
//
//   scalar member k: v          -> field (k, v); non-strings as JSON literals
//   object member k: {...}      -> complex k
//   array of objects k: [...]   -> one complex per element, typed by the
//                                  singular of k (packages -> package)
//   array of scalars k: [...]   -> fields k[0], k[1], ...
//   empty array k: []           -> field k[] with an empty value
//
// Array element types missing from the singular table are written k[]; an
// object whose key collides with a singular is written k{}.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "petra/common/error.h"
#include "petra/sbom/purl.h"
#include "petra/sbom/tree.h"

namespace petra::sbom {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kExtensionsKey = "x-petra-extensions";
constexpr std::string_view kRedactedKey = "petra:redacted";

struct Schema {
  std::map<std::string, std::string> singular;  // plural -> singular
  std::map<std::string, std::string> plural;    // singular -> plural
  // (parent segment, key) pairs that are objects despite matching a
  // singular name.
  std::set<std::pair<std::string, std::string>> object_members;
  // (parent segment or "*", key) pairs holding non-string scalars.
  std::set<std::pair<std::string, std::string>> literal_members;
  std::set<std::string> root_keys;
  // Root members whose object value is flattened into "key/member" fields,
  // keeping document-level metadata as plain fields of the SBOM node.
  std::set<std::string> flattened_roots;
};

Schema MakeSchema(std::initializer_list<std::pair<const char*, const char*>> arrays,
                  std::set<std::pair<std::string, std::string>> objects,
                  std::set<std::pair<std::string, std::string>> literals,
                  std::set<std::string> roots,
                  std::set<std::string> flattened = {}) {
  Schema s;
  for (const auto& [p, one] : arrays) {
    s.singular[p] = one;
    s.plural[one] = p;
  }
  s.object_members = std::move(objects);
  s.literal_members = std::move(literals);
  s.root_keys = std::move(roots);
  s.flattened_roots = std::move(flattened);
  return s;
}

const Schema& SpdxSchema() {
  static const Schema* schema = new Schema(MakeSchema(
      {{"packages", "package"},
       {"files", "file"},
       {"relationships", "relationship"},
       {"snippets", "snippet"},
       {"annotations", "annotation"},
       {"externalRefs", "externalRef"},
       {"checksums", "checksum"},
       {"externalDocumentRefs", "externalDocumentRef"},
       {"hasExtractedLicensingInfos", "extractedLicensingInfo"},
       {"ranges", "range"}},
      {},
      {{"*", "filesAnalyzed"}, {"*", "offset"}, {"*", "lineNumber"}},
      {"spdxVersion", "dataLicense", "SPDXID", "name", "documentNamespace",
       "creationInfo", "comment", "externalDocumentRefs",
       "hasExtractedLicensingInfos", "documentDescribes", "packages", "files",
       "snippets", "relationships", "annotations"},
      {"creationInfo"}));
  return *schema;
}

const Schema& CycloneDxSchema() {
  static const Schema* schema = new Schema(MakeSchema(
      {{"components", "component"},
       {"services", "service"},
       {"dependencies", "dependency"},
       {"vulnerabilities", "vulnerability"},
       {"licenses", "licenseChoice"},
       {"externalReferences", "externalReference"},
       {"hashes", "hash"},
       {"properties", "property"},
       {"ratings", "rating"},
       {"affects", "affect"},
       {"versions", "affectedVersion"},
       {"tools", "tool"},
       {"authors", "author"},
       {"advisories", "advisory"},
       {"compositions", "composition"},
       {"occurrences", "occurrence"}},
      {{"metadata", "component"}},
      {{"sbom", "version"}, {"*", "score"}},
      {"bomFormat", "specVersion", "serialNumber", "version", "metadata",
       "components", "services", "externalReferences", "dependencies",
       "compositions", "properties", "vulnerabilities", "annotations",
       "formulation", "signature"}));
  return *schema;
}

const Schema& SchemaFor(SourceFormat format) {
  return format == SourceFormat::kCycloneDx ? CycloneDxSchema() : SpdxSchema();
}

absl::Status Malformed(std::string_view what) {
  return Error(ErrorCode::kMalformedDocument, what);
}

bool IsLiteralMember(const Schema& schema, const std::string& parent,
                     const std::string& key) {
  return schema.literal_members.contains({parent, key}) ||
         schema.literal_members.contains({"*", key});
}

// ---------------------------------------------------------------- ingestion

absl::Status AppendObject(const Json& object, const std::string& segment,
                          const Schema& schema, std::vector<Node>& out,
                          int depth);

absl::Status AppendMember(const std::string& key, const Json& value,
                          const std::string& parent, const Schema& schema,
                          std::vector<Node>& out, int depth) {
  if (depth > 200) return Malformed("document nested too deeply");
  if (key.empty()) return Malformed("empty JSON key");
  if (value.is_string()) {
    out.push_back(Node::Field(key, value.get<std::string>()));
    return absl::OkStatus();
  }
  if (value.is_primitive()) {
    out.push_back(Node::Field(key, value.dump()));
    return absl::OkStatus();
  }
  if (value.is_object()) {
    std::string type = key;
    if (schema.plural.contains(key) &&
        !schema.object_members.contains({parent, key})) {
      type += "{}";
    }
    Node node = Node::Complex(type);
    PETRA_RETURN_IF_ERROR(
        AppendObject(value, key, schema, node.children, depth + 1));
    out.push_back(std::move(node));
    return absl::OkStatus();
  }
  // Array.
  if (value.empty()) {
    out.push_back(Node::Field(key + "[]", ""));
    return absl::OkStatus();
  }
  bool any_object = false, any_scalar = false;
  for (const Json& element : value) {
    if (element.is_array()) return Malformed("nested arrays under " + key);
    (element.is_object() ? any_object : any_scalar) = true;
  }
  if (any_object && any_scalar) {
    return Malformed("mixed scalar/object array under " + key);
  }
  if (any_scalar) {
    size_t i = 0;
    for (const Json& element : value) {
      std::string name = key + "[" + std::to_string(i++) + "]";
      out.push_back(Node::Field(name, element.is_string()
                                          ? element.get<std::string>()
                                          : element.dump()));
    }
    return absl::OkStatus();
  }
  auto it = schema.singular.find(key);
  const std::string type = it != schema.singular.end() ? it->second : key + "[]";
  for (const Json& element : value) {
    Node node = Node::Complex(type);
    PETRA_RETURN_IF_ERROR(
        AppendObject(element, type, schema, node.children, depth + 1));
    out.push_back(std::move(node));
  }
  return absl::OkStatus();
}

absl::Status AppendObject(const Json& object, const std::string& segment,
                          const Schema& schema, std::vector<Node>& out,
                          int depth) {
  for (const auto& [key, value] : object.items()) {
    if (depth == 0 && value.is_object() &&
        schema.flattened_roots.contains(key)) {
      if (value.empty()) {
        out.push_back(Node::Field(key + "/", ""));
        continue;
      }
      for (const auto& [member, inner] : value.items()) {
        PETRA_RETURN_IF_ERROR(AppendMember(key + "/" + member, inner, segment,
                                           schema, out, depth + 1));
      }
      continue;
    }
    PETRA_RETURN_IF_ERROR(AppendMember(key, value, segment, schema, out, depth));
  }
  return absl::OkStatus();
}

std::optional<std::string> ValidPurlString(const Json& value) {
  if (value.is_string() && IsValidPurl(value.get<std::string>())) {
    return value.get<std::string>();
  }
  return std::nullopt;
}

std::optional<std::string> PackagePurl(const Json& package) {
  if (!package.contains("externalRefs") || !package["externalRefs"].is_array()) {
    return std::nullopt;
  }
  for (const Json& ref : package["externalRefs"]) {
    if (ref.is_object() && ref.value("referenceType", "") == "purl") {
      if (auto p = ValidPurlString(ref.value("referenceLocator", Json()))) {
        return p;
      }
    }
  }
  return std::nullopt;
}

std::string StringMember(const Json& object, const char* key) {
  if (object.is_object() && object.contains(key) && object[key].is_string()) {
    return object[key].get<std::string>();
  }
  return "";
}

absl::StatusOr<std::string> DeriveSpdxIndex(const Json& doc) {
  std::string described;
  if (doc.contains("documentDescribes") && doc["documentDescribes"].is_array() &&
      !doc["documentDescribes"].empty() &&
      doc["documentDescribes"][0].is_string()) {
    described = doc["documentDescribes"][0].get<std::string>();
  } else if (doc.contains("relationships") && doc["relationships"].is_array()) {
    for (const Json& rel : doc["relationships"]) {
      if (StringMember(rel, "spdxElementId") == "SPDXRef-DOCUMENT" &&
          StringMember(rel, "relationshipType") == "DESCRIBES") {
        described = StringMember(rel, "relatedSpdxElement");
        break;
      }
    }
  }
  const Json* described_pkg = nullptr;
  if (doc.contains("packages") && doc["packages"].is_array()) {
    for (const Json& pkg : doc["packages"]) {
      if (!described.empty() && StringMember(pkg, "SPDXID") == described) {
        described_pkg = &pkg;
      }
    }
    if (described_pkg != nullptr) {
      if (auto p = PackagePurl(*described_pkg)) return *p;
    }
    for (const Json& pkg : doc["packages"]) {
      if (auto p = PackagePurl(pkg)) return *p;
    }
  }
  std::string name = StringMember(doc, "documentNamespace");
  if (name.empty()) name = StringMember(doc, "name");
  if (name.empty()) {
    return Error(ErrorCode::kMissingIndex,
                 "no pURL, documentNamespace or name to index the SBOM");
  }
  std::string version =
      described_pkg ? StringMember(*described_pkg, "versionInfo") : "";
  return GenericPurl(name, version);
}

absl::StatusOr<std::string> DeriveCycloneDxIndex(const Json& doc) {
  const Json meta = doc.value("metadata", Json::object());
  const Json component = meta.is_object() ? meta.value("component", Json())
                                          : Json();
  if (component.is_object()) {
    if (auto p = ValidPurlString(component.value("purl", Json()))) return *p;
  }
  if (doc.contains("components") && doc["components"].is_array()) {
    for (const Json& c : doc["components"]) {
      if (c.is_object()) {
        if (auto p = ValidPurlString(c.value("purl", Json()))) return *p;
      }
    }
  }
  std::string name = StringMember(component, "name");
  if (name.empty()) name = StringMember(doc, "serialNumber");
  if (name.empty()) {
    return Error(ErrorCode::kMissingIndex,
                 "no pURL, component name or serial number to index the SBOM");
  }
  return GenericPurl(name, StringMember(component, "version"));
}

absl::StatusOr<Json> ParseJson(ByteView document) {
  Json doc = Json::parse(document.begin(), document.end(), nullptr, false);
  if (doc.is_discarded()) return Malformed("document is not valid JSON");
  if (!doc.is_object()) return Malformed("document root is not an object");
  return doc;
}

// ------------------------------------------------------------------ export

struct ExportContext {
  const Schema& schema;
  bool filter_root;  // move non-schema root members to extensions
  Json extensions = Json::object();
};

absl::StatusOr<Json> ExportDocument(const Node& sbom);

// Splits "name[3]" into ("name", 3) and "name[]" into ("name", -1).
std::optional<std::pair<std::string, long>> SplitIndexed(const std::string& name) {
  if (name.size() < 3 || name.back() != ']') return std::nullopt;
  size_t open = name.rfind('[');
  if (open == std::string::npos || open == 0) return std::nullopt;
  std::string digits = name.substr(open + 1, name.size() - open - 2);
  if (digits.empty()) return std::make_pair(name.substr(0, open), -1L);
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return std::make_pair(name.substr(0, open), std::stol(digits));
}

Json Scalar(const Schema& schema, const std::string& parent,
            const std::string& key, const std::string& value) {
  if (IsLiteralMember(schema, parent, key)) {
    Json literal = Json::parse(value, nullptr, false);
    if (!literal.is_discarded() && literal.is_primitive()) return literal;
  }
  return value;
}

absl::Status ExportChildren(const std::vector<Node>& children,
                            const std::string& segment, ExportContext& ctx,
                            Json& out, bool at_root);

absl::StatusOr<Json> ExportObject(const Node& node, const std::string& segment,
                                  ExportContext& ctx) {
  Json out = Json::object();
  PETRA_RETURN_IF_ERROR(ExportChildren(node.children, segment, ctx, out, false));
  return out;
}

absl::Status ExportChildren(const std::vector<Node>& children,
                            const std::string& segment, ExportContext& ctx,
                            Json& out, bool at_root) {
  for (const Node& child : children) {
    Json* target = &out;
    std::string key;
    switch (child.kind) {
      case NodeKind::kField:
        key = child.name;
        if (auto split = SplitIndexed(child.name)) key = split->first;
        break;
      case NodeKind::kComplex:
        key = child.name;
        if (key.ends_with("{}") || key.ends_with("[]")) {
          key = key.substr(0, key.size() - 2);
        } else if (ctx.schema.plural.contains(key) &&
                   !ctx.schema.object_members.contains({segment, key})) {
          key = ctx.schema.plural.at(key);
        }
        break;
      case NodeKind::kSbom: {
        PETRA_ASSIGN_OR_RETURN(Json doc, ExportDocument(child));
        Json entry = {{"index", child.name}, {"format", child.value},
                      {"document", std::move(doc)}};
        ctx.extensions["embeddedSboms"].push_back(std::move(entry));
        continue;
      }
      case NodeKind::kPlaceholder: {
        Json marker = {{"policy", child.name}, {"hash", child.value}};
        if (!child.children.empty()) {
          PETRA_ASSIGN_OR_RETURN(marker["children"],
                                 ExportObject(child, "?", ctx));
        }
        out[std::string(kRedactedKey)].push_back(std::move(marker));
        continue;
      }
    }
    std::string root_key = key;
    if (size_t slash = key.find('/');
        at_root && slash != std::string::npos &&
        ctx.schema.flattened_roots.contains(key.substr(0, slash))) {
      root_key = key.substr(0, slash);
      target = &out[root_key];
      if (target->is_null()) *target = Json::object();
      key = key.substr(slash + 1);
    }
    if (at_root && ctx.filter_root && !ctx.schema.root_keys.contains(root_key)) {
      Json& fields = ctx.extensions["fields"];
      if (fields.is_null()) fields = Json::object();
      target = root_key == key ? &fields : &fields[root_key];
    }
    if (key.empty()) continue;  // flattened empty object
    Json& slot = (*target)[key];
    if (child.is_field()) {
      auto split = SplitIndexed(child.name);
      if (split && split->second < 0) {
        if (slot.is_null()) slot = Json::array();
      } else if (split) {
        slot.push_back(Scalar(ctx.schema, segment, key, child.value));
      } else {
        slot = Scalar(ctx.schema, segment, key, child.value);
      }
      continue;
    }
    PETRA_ASSIGN_OR_RETURN(Json object, ExportObject(child, child.name, ctx));
    const bool is_element = child.name != key && !child.name.ends_with("{}");
    if (is_element) {
      slot.push_back(std::move(object));
    } else {
      slot = std::move(object);
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> ExportAs(const Node& sbom, SourceFormat target,
                              bool filter_root) {
  ExportContext ctx{SchemaFor(target), filter_root};
  Json out = Json::object();
  PETRA_RETURN_IF_ERROR(ExportChildren(sbom.children, "sbom", ctx, out, true));
  if (!ctx.extensions.empty()) {
    out[std::string(kExtensionsKey)] = std::move(ctx.extensions);
  }
  return out;
}

absl::StatusOr<Json> ExportDocument(const Node& sbom) {
  SourceFormat format = SourceFormat::kNative;
  if (auto parsed = ParseFormatName(sbom.value); parsed.ok()) format = *parsed;
  if (format == SourceFormat::kNative) format = SourceFormat::kSpdx;
  return ExportAs(sbom, format, false);
}

}  // namespace

absl::StatusOr<SourceFormat> DetectFormat(ByteView document) {
  if (document.size() >= 4 && ToString(document.first(4)) == "PTRE") {
    return SourceFormat::kNative;
  }
  PETRA_ASSIGN_OR_RETURN(Json doc, ParseJson(document));
  if (doc.contains("spdxVersion")) return SourceFormat::kSpdx;
  if (doc.value("bomFormat", "") == "CycloneDX") return SourceFormat::kCycloneDx;
  return Error(ErrorCode::kUnsupportedFormat,
               "neither an SPDX nor a CycloneDX JSON document");
}

absl::StatusOr<SbomTree> ParseSbom(ByteView document, SourceFormat format) {
  if (format == SourceFormat::kNative) return ParseNative(document);
  PETRA_ASSIGN_OR_RETURN(Json doc, ParseJson(document));
  std::string index;
  if (format == SourceFormat::kSpdx) {
    const std::string version = StringMember(doc, "spdxVersion");
    if (version.empty()) return Malformed("missing spdxVersion");
    if (!version.starts_with("SPDX-2.")) {
      return Error(ErrorCode::kUnsupportedFormat,
                   "unsupported SPDX version " + version);
    }
    PETRA_ASSIGN_OR_RETURN(index, DeriveSpdxIndex(doc));
  } else if (format == SourceFormat::kCycloneDx) {
    if (StringMember(doc, "bomFormat") != "CycloneDX") {
      return Malformed("bomFormat is not CycloneDX");
    }
    const std::string spec = StringMember(doc, "specVersion");
    if (!spec.starts_with("1.")) {
      return Error(ErrorCode::kUnsupportedFormat,
                   "unsupported CycloneDX version " + spec);
    }
    PETRA_ASSIGN_OR_RETURN(index, DeriveCycloneDxIndex(doc));
  } else {
    return Error(ErrorCode::kUnsupportedFormat, "unknown format");
  }
  SbomTree tree;
  tree.format = format;
  tree.root = Node::Sbom(index, std::string(FormatName(format)));
  PETRA_RETURN_IF_ERROR(
      AppendObject(doc, "sbom", SchemaFor(format), tree.root.children, 0));
  PETRA_RETURN_IF_ERROR(ValidateTree(tree));
  return tree;
}

absl::StatusOr<std::string> ExportPlaintext(const SbomTree& tree,
                                            SourceFormat format) {
  if (format == SourceFormat::kNative) {
    return Error(ErrorCode::kUnsupportedFormat,
                 "use SerializeTree for the native encoding");
  }
  if (tree.format != format && tree.format != SourceFormat::kNative) {
    return Error(ErrorCode::kUnsupportedFormat,
                 "cannot export a " + std::string(FormatName(tree.format)) +
                     " tree as " + std::string(FormatName(format)));
  }
  PETRA_ASSIGN_OR_RETURN(
      Json doc, ExportAs(tree.root, format, tree.format == SourceFormat::kNative));
  return doc.dump(2);
}

}  // namespace petra::sbom
