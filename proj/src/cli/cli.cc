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

#include "petra/cli/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "petra/abe/abkem.h"
#include "petra/cli/bench.h"
#include "petra/cli/store.h"
#include "petra/common/error.h"
#include "petra/common/file_io.h"
#include "petra/crypto/primitives.h"
#include "petra/kms/http.h"
#include "petra/kms/key_service.h"
#include "petra/merkle/container.h"
#include "petra/merkle/merkle.h"
#include "petra/pipeline/pipeline.h"
#include "petra/policy/redaction_policy.h"
#include "petra/sbom/synthetic.h"
#include "petra/sbom/tree.h"

namespace petra::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view kSyntheticPrefix = "synthetic:";
constexpr char kDefaultConfig[] = "petra.toml";

// Options shared by every subcommand; flags override the config file.
struct Globals {
  std::string config;
  std::string params;
  std::string gen_pub;
  std::string prod_pub;
  std::string gen_key;
  std::string prod_key;
  std::string store;
  std::string kms;
  std::string now;
  std::map<std::string, std::string> settings;  // from the config file
};

std::string Setting(const Globals& g, const std::string& flag,
                    const std::string& key) {
  if (!flag.empty()) return flag;
  auto it = g.settings.find(key);
  return it == g.settings.end() ? "" : it->second;
}

absl::StatusOr<std::string> Required(const Globals& g, const std::string& flag,
                                     const std::string& key,
                                     std::string_view option) {
  std::string value = Setting(g, flag, key);
  if (value.empty()) {
    return Error(ErrorCode::kUsage,
                 absl::StrCat("missing ", std::string(option), " (or '", key,
                              "' in the config file)"));
  }
  return value;
}

absl::StatusOr<Bytes> ReadBytes(const std::string& path) {
  PETRA_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  return ToBytes(text);
}

absl::StatusOr<abe::PublicParams> LoadParams(const Globals& g) {
  PETRA_ASSIGN_OR_RETURN(std::string path,
                         Required(g, g.params, "params", "--params"));
  PETRA_ASSIGN_OR_RETURN(Bytes bytes, ReadBytes(path));
  return abe::DecodePublicParams(bytes);
}

absl::StatusOr<Bytes> LoadSigningKey(const Globals& g, const std::string& flag,
                                     const std::string& key,
                                     std::string_view option) {
  PETRA_ASSIGN_OR_RETURN(std::string path, Required(g, flag, key, option));
  return ReadBytes(path);
}

absl::StatusOr<merkle::RedactedSbom> LoadContainer(const std::string& path) {
  PETRA_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  return merkle::ReadContainer(text);
}

absl::StatusOr<abe::AttributeSecretKey> LoadAttributeKey(
    const std::string& path) {
  PETRA_ASSIGN_OR_RETURN(Bytes bytes, ReadBytes(path));
  return abe::DecodeSecretKey(bytes);
}

absl::StatusOr<sbom::SbomTree> LoadSbom(const std::string& path) {
  PETRA_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  PETRA_ASSIGN_OR_RETURN(sbom::SourceFormat format,
                         sbom::DetectFormat(AsBytes(text)));
  return sbom::ParseSbom(AsBytes(text), format);
}

absl::StatusOr<policy::YearMonth> ResolveNow(const Globals& g) {
  if (g.now.empty()) return policy::YearMonth::Now();
  return policy::YearMonth::Parse(g.now);
}

absl::StatusOr<policy::RedactionPolicy> LoadPolicy(const std::string& spec,
                                                   const sbom::Node& root) {
  if (spec.starts_with(kSyntheticPrefix)) {
    PETRA_ASSIGN_OR_RETURN(
        policy::SyntheticPolicy kind,
        policy::ParseSyntheticPolicyName(
            std::string_view(spec).substr(kSyntheticPrefix.size())));
    return policy::SynthesizePolicy(kind, root);
  }
  auto text = ReadFileToString(spec);
  if (!text.ok()) {
    return Error(ErrorCode::kPolicyNotFound,
                 absl::StrCat("cannot read policy ", spec));
  }
  return policy::ParsePolicy(AsBytes(*text));
}

void PrintJson(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int Fail(std::ostream& err, const absl::Status& status) {
  const auto code = GetErrorCode(status);
  err << json{{"error", code ? ErrorCodeName(*code) : "INTERNAL"},
              {"message", std::string(status.message())}}
             .dump()
      << "\n";
  return ExitCodeFor(status);
}

std::string_view KindName(sbom::NodeKind kind) {
  switch (kind) {
    case sbom::NodeKind::kField:
      return "field";
    case sbom::NodeKind::kComplex:
      return "complex";
    case sbom::NodeKind::kSbom:
      return "sbom";
    case sbom::NodeKind::kPlaceholder:
      return "placeholder";
  }
  return "unknown";
}

json SignatureStatus(const merkle::RedactedSbom& sbom, ByteView pk_gen,
                     ByteView pk_prod) {
  auto root = merkle::MerkleRoot(sbom.root);
  const bool root_ok = root.ok() && *root == sbom.merkle_root;
  const bool gen_ok = root_ok && VerifySignature(pk_gen, sbom.merkle_root,
                                                 sbom.generator_signature);
  std::string producer = "missing";
  if (!sbom.producer_signature.empty()) {
    producer = VerifySignature(pk_prod, sbom.generator_signature,
                               sbom.producer_signature)
                   ? "valid"
                   : "invalid";
  }
  return json{{"root_recomputes", root_ok},
              {"generator", gen_ok ? "valid" : "invalid"},
              {"producer", producer}};
}

json SamenessJson(const merkle::SamenessReport& report) {
  json mismatched = json::array();
  for (size_t i = 0; i < report.nodes.size(); ++i) {
    if (report.nodes[i] == merkle::NodeCheck::kMismatch) mismatched.push_back(i);
  }
  return json{{"match", report.Count(merkle::NodeCheck::kMatch)},
              {"mismatch", report.Count(merkle::NodeCheck::kMismatch)},
              {"unverifiable", report.Count(merkle::NodeCheck::kUnverifiable)},
              {"assumed", report.Count(merkle::NodeCheck::kAssumed)},
              {"mismatched_nodes", mismatched}};
}

// Keeps selected subtrees, their ancestors and every placeholder.
bool Prune(const sbom::Node& in, sbom::NodeId& next,
           const std::set<sbom::NodeId>& selected, bool inside,
           sbom::Node& out) {
  const sbom::NodeId id = next++;
  const bool keep_all = inside || selected.contains(id);
  out = in;
  out.children.clear();
  bool keep = keep_all || in.is_placeholder();
  for (const sbom::Node& child : in.children) {
    sbom::Node pruned;
    if (Prune(child, next, selected, keep_all, pruned)) {
      out.children.push_back(std::move(pruned));
      keep = true;
    }
  }
  return keep;
}

// inside[id] is true when `id` or one of its ancestors is selected.
void MarkSelected(const sbom::Node& node, sbom::NodeId& next,
                  const std::set<sbom::NodeId>& selected, bool parent_inside,
                  std::vector<bool>& inside) {
  const sbom::NodeId id = next++;
  inside[id] = parent_inside || selected.contains(id);
  for (const sbom::Node& child : node.children) {
    MarkSelected(child, next, selected, inside[id], inside);
  }
}

std::vector<bool> SelectedSubtrees(const sbom::Node& root,
                                   const std::set<sbom::NodeId>& selected) {
  std::vector<bool> inside(sbom::CountNodes(root), false);
  sbom::NodeId next = 0;
  MarkSelected(root, next, selected, false, inside);
  return inside;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct RedactArgs {
  std::vector<std::string> sboms;
  std::vector<std::string> embeds;
  std::string policy;
  std::string out_dir = ".";
  std::string name;
  std::optional<uint64_t> seed;
};

int RunRedact(const Globals& g, const RedactArgs& a, std::ostream& out,
              std::ostream& err) {
  std::vector<sbom::SbomTree> inputs;
  for (const std::string& path : a.sboms) {
    auto tree = LoadSbom(path);
    if (!tree.ok()) return Fail(err, tree.status());
    inputs.push_back(*std::move(tree));
  }
  auto policy = LoadPolicy(a.policy, inputs.front().root);
  if (!policy.ok()) return Fail(err, policy.status());
  auto pp = LoadParams(g);
  if (!pp.ok()) return Fail(err, pp.status());
  auto sk_gen = LoadSigningKey(g, g.gen_key, "generator_secret_key",
                               "--gen-key");
  if (!sk_gen.ok()) return Fail(err, sk_gen.status());
  auto now = ResolveNow(g);
  if (!now.ok()) return Fail(err, now.status());

  std::optional<DeterministicRandom> seeded;
  if (a.seed) seeded.emplace(*a.seed);
  pipeline::RedactOptions options;
  options.rng = seeded ? &*seeded : &DefaultRandom();
  options.now = *now;

  absl::StatusOr<pipeline::RedactionResult> result;
  if (a.embeds.empty()) {
    result = pipeline::Redact(inputs, *policy, *pp, *sk_gen, options);
  } else {
    auto pk_gen = LoadSigningKey(g, g.gen_pub, "generator_public_key",
                                 "--gen-pub");
    if (!pk_gen.ok()) return Fail(err, pk_gen.status());
    auto pk_prod = LoadSigningKey(g, g.prod_pub, "producer_public_key",
                                  "--prod-pub");
    if (!pk_prod.ok()) return Fail(err, pk_prod.status());
    std::vector<merkle::RedactedSbom> children;
    for (const std::string& path : a.embeds) {
      auto child = LoadContainer(path);
      if (!child.ok()) return Fail(err, child.status());
      children.push_back(*std::move(child));
    }
    sbom::SbomTree parent = inputs.front();
    for (size_t i = 1; i < inputs.size(); ++i) {
      parent.root.children.push_back(inputs[i].root);
    }
    result = pipeline::Compose(parent, children, *policy, *pp, *sk_gen,
                               *pk_gen, *pk_prod, options);
  }
  if (!result.ok()) return Fail(err, result.status());

  const std::string prod_key = Setting(g, g.prod_key, "producer_secret_key");
  if (!prod_key.empty()) {
    auto sk_prod = ReadBytes(prod_key);
    if (!sk_prod.ok()) return Fail(err, sk_prod.status());
    auto signed_sbom =
        pipeline::Countersign(result->redacted, result->plain, *sk_prod);
    if (!signed_sbom.ok()) return Fail(err, signed_sbom.status());
    result->redacted = *std::move(signed_sbom);
  }

  std::string name = a.name;
  if (name.empty()) {
    name = fs::path(a.sboms.front()).filename().string();
    if (const size_t dot = name.find('.'); dot != std::string::npos) {
      name.resize(dot);
    }
  }
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  const fs::path container = fs::path(a.out_dir) / (name + ".petra");
  const fs::path salts = fs::path(a.out_dir) / (name + ".petra-salts");
  absl::Status status = WriteFileAtomic(
      container, AsBytes(merkle::WriteContainer(result->redacted)), false);
  if (status.ok()) {
    status = WriteFileAtomic(
        salts, AsBytes(merkle::WriteSaltFile(result->plain)), true);
  }
  if (!status.ok()) return Fail(err, status);
  PrintJson(out, json{{"container", container.string()},
                      {"salts", salts.string()},
                      {"merkle_root", HexEncode(result->redacted.merkle_root)},
                      {"nodes", merkle::CountRedacted(result->redacted.root)},
                      {"keyslots", result->redacted.root.keyslots.size()},
                      {"countersigned",
                       !result->redacted.producer_signature.empty()}});
  return kExitOk;
}

struct CountersignArgs {
  std::string sbom;
  std::string plaintext;
  std::string out;
};

int RunCountersign(const Globals& g, const CountersignArgs& a,
                   std::ostream& out, std::ostream& err) {
  auto sbom = LoadContainer(a.sbom);
  if (!sbom.ok()) return Fail(err, sbom.status());
  auto text = ReadFileToString(a.plaintext);
  if (!text.ok()) return Fail(err, text.status());
  auto bundle = merkle::ReadSaltFile(*text);
  if (!bundle.ok()) return Fail(err, bundle.status());
  auto sk_prod = LoadSigningKey(g, g.prod_key, "producer_secret_key",
                                "--prod-key");
  if (!sk_prod.ok()) return Fail(err, sk_prod.status());
  auto signed_sbom = pipeline::Countersign(*sbom, *bundle, *sk_prod);
  if (!signed_sbom.ok()) return Fail(err, signed_sbom.status());
  const std::string target = a.out.empty() ? a.sbom : a.out;
  absl::Status status = WriteFileAtomic(
      target, AsBytes(merkle::WriteContainer(*signed_sbom)), false);
  if (!status.ok()) return Fail(err, status);
  PrintJson(out, json{{"container", target},
                      {"merkle_root", HexEncode(signed_sbom->merkle_root)}});
  return kExitOk;
}

struct VerifyArgs {
  std::string sbom;
  std::string plaintext;
  std::string key;
  std::string field;
};

// Adds the membership result for `id` to `report`; false if it fails.
bool ReportMembership(const merkle::RedactedSbom& sbom, sbom::NodeId id,
                      bool node_checked, json& report) {
  auto proof = merkle::ProveMembership(sbom.root, id);
  const bool ok = proof.ok() && node_checked &&
                  merkle::VerifyMembership(*proof, sbom.merkle_root);
  report["membership"] = json{{"node", id}, {"verified", ok}};
  return ok;
}

int RunVerify(const Globals& g, const VerifyArgs& a, std::ostream& out,
              std::ostream& err) {
  auto sbom = LoadContainer(a.sbom);
  if (!sbom.ok()) return Fail(err, sbom.status());
  auto pk_gen = LoadSigningKey(g, g.gen_pub, "generator_public_key",
                               "--gen-pub");
  if (!pk_gen.ok()) return Fail(err, pk_gen.status());
  auto pk_prod = LoadSigningKey(g, g.prod_pub, "producer_public_key",
                                "--prod-pub");
  if (!pk_prod.ok()) return Fail(err, pk_prod.status());
  std::optional<policy::PathSelector> field;
  if (!a.field.empty()) {
    auto selector = policy::PathSelector::Parse(a.field);
    if (!selector.ok()) return Fail(err, selector.status());
    field = *std::move(selector);
  }

  json report = {{"merkle_root", HexEncode(sbom->merkle_root)},
                 {"signatures", SignatureStatus(*sbom, *pk_gen, *pk_prod)}};
  // The producer checks its own tree before countersigning, so a missing
  // countersignature is acceptable only with the plaintext bundle.
  const bool require_countersig = a.plaintext.empty();
  absl::Status trusted = VerifyContainerSignatures(*sbom, *pk_gen, *pk_prod,
                                                   require_countersig);
  if (!trusted.ok()) {
    PrintJson(out, report);
    return Fail(err, trusted);
  }

  if (!a.plaintext.empty()) {
    auto text = ReadFileToString(a.plaintext);
    if (!text.ok()) return Fail(err, text.status());
    auto bundle = merkle::ReadSaltFile(*text);
    if (!bundle.ok()) return Fail(err, bundle.status());
    report["plain_signature"] =
        VerifySignature(*pk_gen, bundle->plain_root, bundle->plain_signature)
            ? "valid"
            : "invalid";
    auto sameness =
        merkle::VerifySameness(sbom->root, bundle->tree.root, bundle->salts);
    if (!sameness.ok()) return Fail(err, sameness.status());
    report["sameness"] = SamenessJson(*sameness);
    bool ok = sameness->Count(merkle::NodeCheck::kMismatch) == 0;
    if (field) {
      auto id = merkle::ResolveUniqueNode(bundle->tree.root, *field);
      if (!id.ok()) return Fail(err, id.status());
      ok &= ReportMembership(
          *sbom, *id, sameness->nodes[*id] == merkle::NodeCheck::kMatch,
          report);
    }
    PrintJson(out, report);
    if (!ok) {
      return Fail(err, Error(ErrorCode::kGeneratorProducerLied,
                             "redacted tree does not match the plaintext"));
    }
    return kExitOk;
  }

  if (!a.key.empty()) {
    auto pp = LoadParams(g);
    if (!pp.ok()) return Fail(err, pp.status());
    auto key = LoadAttributeKey(a.key);
    if (!key.ok()) return Fail(err, key.status());
    auto now = ResolveNow(g);
    if (!now.ok()) return Fail(err, now.status());
    pipeline::ConsumeOptions options;
    options.now = *now;
    options.query = field;
    auto view = pipeline::Consume(*sbom, *pp, *key, *pk_gen, *pk_prod, options);
    if (!view.ok()) {
      PrintJson(out, report);
      return Fail(err, view.status());
    }
    report["decrypted_nodes"] = view->decrypted_nodes;
    report["placeholder_nodes"] = view->placeholder_nodes;
    auto sameness =
        merkle::VerifySameness(sbom->root, view->tree.root, view->salts);
    if (!sameness.ok()) return Fail(err, sameness.status());
    report["sameness"] = SamenessJson(*sameness);
    bool ok = sameness->Count(merkle::NodeCheck::kMismatch) == 0;
    if (view->query_node) {
      ok &= ReportMembership(*sbom, *view->query_node,
                             view->query_proof.has_value(), report);
    }
    PrintJson(out, report);
    if (!ok) {
      return Fail(err, Error(ErrorCode::kGeneratorProducerLied,
                             "decrypted content does not match its hashes"));
    }
    return kExitOk;
  }

  PrintJson(out, report);
  return kExitOk;
}

struct QueryArgs {
  std::string sbom;
  std::string key;
  std::string select = "**";
  std::string format = "json";
};

int RunQuery(const Globals& g, const QueryArgs& a, std::ostream& out,
             std::ostream& err) {
  auto selector = policy::PathSelector::Parse(a.select);
  if (!selector.ok()) return Fail(err, selector.status());
  auto sbom = LoadContainer(a.sbom);
  if (!sbom.ok()) return Fail(err, sbom.status());
  auto pp = LoadParams(g);
  if (!pp.ok()) return Fail(err, pp.status());
  auto key = LoadAttributeKey(a.key);
  if (!key.ok()) return Fail(err, key.status());
  auto pk_gen = LoadSigningKey(g, g.gen_pub, "generator_public_key",
                               "--gen-pub");
  if (!pk_gen.ok()) return Fail(err, pk_gen.status());
  auto pk_prod = LoadSigningKey(g, g.prod_pub, "producer_public_key",
                                "--prod-pub");
  if (!pk_prod.ok()) return Fail(err, pk_prod.status());
  auto now = ResolveNow(g);
  if (!now.ok()) return Fail(err, now.status());

  pipeline::ConsumeOptions options;
  options.now = *now;
  auto view = pipeline::Consume(*sbom, *pp, *key, *pk_gen, *pk_prod, options);
  if (!view.ok()) return Fail(err, view.status());

  const std::vector<sbom::NodeId> ids =
      policy::SelectNodes(*selector, view->tree.root);
  const std::set<sbom::NodeId> selected(ids.begin(), ids.end());

  if (a.format == "json") {
    json results = json::array();
    json placeholders = json::array();
    const std::vector<bool> inside = SelectedSubtrees(view->tree.root, selected);
    sbom::ForEachNode(view->tree.root, [&](const sbom::NodeRef& ref) {
      const sbom::Node& node = *ref.node;
      if (node.is_placeholder()) {
        placeholders.push_back(json{{"node", ref.id},
                                    {"policy_id", node.name},
                                    {"redacted_hash", node.value}});
        return;
      }
      if (!node.is_field()) return;
      // Fields under a selected complex or SBOM node count as selected.
      const bool hit = inside[ref.id];
      if (hit) {
        results.push_back(json{{"node", ref.id},
                               {"path", sbom::PathString(ref)},
                               {"value", node.value}});
      }
    });
    PrintJson(out, json{{"merkle_root", HexEncode(sbom->merkle_root)},
                        {"select", a.select},
                        {"results", results},
                        {"placeholders", placeholders}});
    return kExitOk;
  }

  auto format = sbom::ParseFormatName(a.format);
  if (!format.ok() || *format == sbom::SourceFormat::kNative) {
    return Fail(err, Error(ErrorCode::kUsage,
                           "--format must be json, spdx or cyclonedx"));
  }
  sbom::SbomTree pruned = view->tree;
  pruned.format = *format;
  sbom::NodeId next = 0;
  Prune(view->tree.root, next, selected, false, pruned.root);
  auto text = sbom::ExportPlaintext(pruned, *format);
  if (!text.ok()) return Fail(err, text.status());
  out << *text << "\n";
  return kExitOk;
}

int RunInspect(const std::string& path, std::ostream& out,
               std::ostream& err) {
  auto sbom = LoadContainer(path);
  if (!sbom.ok()) return Fail(err, sbom.status());
  json report = {{"merkle_root", HexEncode(sbom->merkle_root)},
                 {"countersigned", !sbom->producer_signature.empty()}};
  if (auto index = merkle::PublicRootIndex(sbom->root)) {
    report["index"] = index->index;
    report["format"] = index->format;
  } else {
    report["index"] = nullptr;
  }
  json keyslots = json::array();
  for (const abe::PolicyKeySlot& slot : sbom->root.keyslots) {
    auto access = abe::SlotAccessTree(slot);
    keyslots.push_back(
        json{{"policy_id", HexEncode(slot.policy_id)},
             {"access", access.ok() ? policy::ToExpression(*access) : "?"}});
  }
  report["keyslots"] = keyslots;

  auto hashes = merkle::RedactedPass(sbom->root);
  json nodes = json::array();
  json nested = json::array();
  size_t redacted = 0;
  merkle::ForEachRedacted(sbom->root, [&](const merkle::RedactedRef& ref) {
    const merkle::RedactedNode& node = *ref.node;
    const bool is_redacted = node.marker == merkle::Marker::kRedacted;
    redacted += is_redacted;
    json entry = {{"node", ref.id},
                  {"depth", ref.depth},
                  {"kind", KindName(node.kind)},
                  {"marker", is_redacted ? "R" : "P"}};
    if (is_redacted && node.slot < ref.keyslots->size()) {
      entry["policy_id"] = HexEncode((*ref.keyslots)[node.slot].policy_id);
    }
    nodes.push_back(entry);
    if (node.kind == sbom::NodeKind::kSbom && ref.id != 0) {
      json n = {{"node", ref.id}, {"keyslots", node.keyslots.size()}};
      if (hashes.ok()) n["merkle_root"] = HexEncode((*hashes)[ref.id]);
      if (auto index = merkle::PublicRootIndex(node)) n["index"] = index->index;
      n["link_verified"] = pipeline::VerifyEmbeddedChain(*sbom, ref.id);
      nested.push_back(n);
    }
  });
  report["node_count"] = nodes.size();
  report["redacted_count"] = redacted;
  report["public_count"] = nodes.size() - redacted;
  report["nested_sboms"] = nested;
  report["nodes"] = nodes;
  PrintJson(out, report);
  return kExitOk;
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string purl;
};

int RunCompare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  auto first = LoadContainer(a.a);
  if (!first.ok()) return Fail(err, first.status());
  auto second = LoadContainer(a.b);
  if (!second.ok()) return Fail(err, second.status());
  auto index_of = [&a](const merkle::RedactedSbom& s) -> std::string {
    if (!a.purl.empty()) return a.purl;
    auto index = merkle::PublicRootIndex(s.root);
    return index ? index->index : "";
  };
  const std::string ia = index_of(*first);
  const std::string ib = index_of(*second);
  const bool same_root = first->merkle_root == second->merkle_root;
  std::string verdict;
  if (same_root) {
    verdict = "identical";
  } else if (ia.empty() || ib.empty()) {
    verdict = "unknown-index";
  } else if (ia == ib) {
    verdict = "split-view";
  } else {
    verdict = "different-artifacts";
  }
  PrintJson(out, json{{"a", {{"index", ia}, {"merkle_root",
                                              HexEncode(first->merkle_root)}}},
                      {"b", {{"index", ib}, {"merkle_root",
                                              HexEncode(second->merkle_root)}}},
                      {"verdict", verdict}});
  if (verdict == "split-view") {
    return Fail(err, Error(ErrorCode::kEquivocation,
                           absl::StrCat(ia, " maps to two merkle roots")));
  }
  return kExitOk;
}

struct StoreArgs {
  std::string sbom;
  std::string purl;
  std::string out;
};

absl::StatusOr<DistributorStore> OpenStore(const Globals& g) {
  PETRA_ASSIGN_OR_RETURN(std::string dir,
                         Required(g, g.store, "store", "--store"));
  PETRA_ASSIGN_OR_RETURN(Bytes pk_gen,
                         LoadSigningKey(g, g.gen_pub, "generator_public_key",
                                        "--gen-pub"));
  PETRA_ASSIGN_OR_RETURN(Bytes pk_prod,
                         LoadSigningKey(g, g.prod_pub, "producer_public_key",
                                        "--prod-pub"));
  return DistributorStore(dir, std::move(pk_gen), std::move(pk_prod));
}

int RunStorePublish(const Globals& g, const StoreArgs& a, std::ostream& out,
                    std::ostream& err) {
  auto store = OpenStore(g);
  if (!store.ok()) return Fail(err, store.status());
  auto text = ReadFileToString(a.sbom);
  if (!text.ok()) return Fail(err, text.status());
  auto result = store->Publish(*text, a.purl);
  if (!result.ok()) return Fail(err, result.status());
  PrintJson(out, json{{"purl", result->purl},
                      {"merkle_root", HexEncode(result->merkle_root)},
                      {"already_present", result->already_present}});
  return kExitOk;
}

int RunStoreFetch(const Globals& g, const StoreArgs& a, std::ostream& out,
                  std::ostream& err) {
  auto store = OpenStore(g);
  if (!store.ok()) return Fail(err, store.status());
  auto text = store->Fetch(a.purl);
  if (!text.ok()) return Fail(err, text.status());
  if (a.out.empty()) {
    out << *text;
    return kExitOk;
  }
  absl::Status status = WriteFileAtomic(a.out, AsBytes(*text), false);
  if (!status.ok()) return Fail(err, status);
  return kExitOk;
}

struct BenchArgs {
  std::string corpus;
  std::string policy;
  std::string csv;
  std::string scheme = "bsw";
  uint64_t seed = 2026;
};

int RunBenchCommand(const BenchArgs& a, std::ostream& out,
                    std::ostream& err) {
  BenchOptions options;
  options.corpus = a.corpus;
  options.policy = a.policy;
  options.seed = a.seed;
  auto scheme = abe::ParseSchemeName(a.scheme);
  if (!scheme.ok()) return Fail(err, scheme.status());
  options.scheme = *scheme;
  auto report = RunBench(options);
  if (!report.ok()) return Fail(err, report.status());
  if (a.csv.empty() || a.csv == "-") {
    WriteBenchCsv(*report, out);
  } else {
    std::ofstream file(a.csv);
    WriteBenchCsv(*report, file);
    if (!file) {
      return Fail(err, Error(ErrorCode::kIo,
                             absl::StrCat("cannot write ", a.csv)));
    }
  }
  const BenchRow mean = report->Mean();
  err << json{{"files", report->rows.size()},
              {"skipped", report->skipped},
              {"mean_overhead_pct", mean.overhead_pct},
              {"mean_encrypt_ms", mean.encrypt_ms},
              {"mean_decrypt_ms", mean.decrypt_ms},
              {"mean_abs_encrypt_decrypt_gap_ms",
               report->MeanAbsEncryptDecryptGapMs()}}
             .dump()
      << "\n";
  return kExitOk;
}

struct CorpusArgs {
  std::string out;
  int count = 20;
  int min_packages = 2;
  int max_packages = 50;
  uint64_t seed = 2026;
};

int RunCorpus(const CorpusArgs& a, std::ostream& out, std::ostream& err) {
  if (a.count < 1 || a.min_packages < 1 || a.max_packages < a.min_packages) {
    return Fail(err, Error(ErrorCode::kUsage,
                           "need count >= 1 and 1 <= min <= max"));
  }
  std::error_code ec;
  fs::create_directories(a.out, ec);
  json written = json::array();
  for (const sbom::CorpusFile& file : sbom::SyntheticCorpus(
           a.count, a.min_packages, a.max_packages, a.seed)) {
    const fs::path path = fs::path(a.out) / file.name;
    absl::Status status = WriteFileAtomic(path, AsBytes(file.content), false);
    if (!status.ok()) return Fail(err, status);
    written.push_back(path.string());
  }
  PrintJson(out, json{{"files", written}});
  return kExitOk;
}

struct KeysArgs {
  std::string state;
  std::string scheme = "bsw";
  std::vector<std::string> claims;
  std::string token;
  std::vector<std::string> attributes;
  std::string out;
};

json GrantJson(const std::string& path, const abe::AttributeSecretKey& key) {
  return json{{"key", path}, {"attributes", key.attributes}};
}

int RunKeysSetup(const KeysArgs& a, std::ostream& out, std::ostream& err) {
  if (a.state.empty()) {
    return Fail(err, Error(ErrorCode::kUsage, "keys setup needs --state"));
  }
  kms::SetupOptions options;
  auto scheme = abe::ParseSchemeName(a.scheme);
  if (!scheme.ok()) return Fail(err, scheme.status());
  options.scheme = *scheme;
  options.claim_mapping.insert(a.claims.begin(), a.claims.end());
  absl::Status status = kms::KmsSetup(a.state, options);
  if (!status.ok()) return Fail(err, status);
  PrintJson(out, json{{"state", a.state},
                      {"scheme", abe::SchemeName(options.scheme)}});
  return kExitOk;
}

int RunKeysIssue(const Globals& g, const KeysArgs& a, std::ostream& out,
                 std::ostream& err) {
  if (a.out.empty()) {
    return Fail(err, Error(ErrorCode::kUsage, "keys issue needs --out"));
  }
  abe::AttributeSecretKey key;
  json extra;
  const std::string kms_url = Setting(g, g.kms, "kms");
  if (!a.token.empty()) {
    if (kms_url.empty()) {
      return Fail(err, Error(ErrorCode::kUsage, "--token needs --kms"));
    }
    auto grant = kms::KmsClient(kms_url).IssueKey(a.token);
    if (!grant.ok()) return Fail(err, grant.status());
    key = grant->key;
    extra = json{{"subject", grant->subject},
                 {"expiry", grant->expiry_window.ToString()}};
  } else {
    // Offline issuance straight from a key-service state directory.
    if (a.state.empty() || a.attributes.empty()) {
      return Fail(err, Error(ErrorCode::kUsage,
                             "keys issue needs --token, or --state and "
                             "--attr"));
    }
    auto pp_bytes = ReadBytes((fs::path(a.state) / kms::kParamsFile).string());
    if (!pp_bytes.ok()) return Fail(err, pp_bytes.status());
    auto mk_bytes =
        ReadBytes((fs::path(a.state) / kms::kMasterKeyFile).string());
    if (!mk_bytes.ok()) return Fail(err, mk_bytes.status());
    auto pp = abe::DecodePublicParams(*pp_bytes);
    if (!pp.ok()) return Fail(err, pp.status());
    auto mk = abe::DecodeMasterKey(*mk_bytes);
    if (!mk.ok()) return Fail(err, mk.status());
    const policy::AttributeSet attributes(a.attributes.begin(),
                                          a.attributes.end());
    auto issued = abe::AbeKeyGen(*pp, *mk, attributes, DefaultRandom());
    if (!issued.ok()) return Fail(err, issued.status());
    key = *std::move(issued);
  }
  absl::Status status =
      WriteFileAtomic(a.out, abe::EncodeSecretKey(key), /*private_file=*/true);
  if (!status.ok()) return Fail(err, status);
  json report = GrantJson(a.out, key);
  if (!extra.is_null()) report.update(extra);
  PrintJson(out, report);
  return kExitOk;
}

int RunKeysRotate(const Globals& g, std::ostream& out, std::ostream& err) {
  const std::string kms_url = Setting(g, g.kms, "kms");
  if (kms_url.empty()) {
    return Fail(err, Error(ErrorCode::kUsage, "keys rotate needs --kms"));
  }
  auto reissued = kms::KmsClient(kms_url).Rotate();
  if (!reissued.ok()) return Fail(err, reissued.status());
  PrintJson(out, json{{"reissued", *reissued}});
  return kExitOk;
}

int RunKeysParams(const Globals& g, const KeysArgs& a, std::ostream& out,
                  std::ostream& err) {
  const std::string kms_url = Setting(g, g.kms, "kms");
  if (kms_url.empty() || a.out.empty()) {
    return Fail(err, Error(ErrorCode::kUsage,
                           "keys params needs --kms and --out"));
  }
  auto pub = kms::KmsClient(kms_url).Params();
  if (!pub.ok()) return Fail(err, pub.status());
  std::error_code ec;
  fs::create_directories(a.out, ec);
  const fs::path dir(a.out);
  absl::Status status =
      WriteFileAtomic(dir / kms::kParamsFile, pub->params, false);
  if (status.ok()) {
    status = WriteFileAtomic(dir / kms::kGeneratorPublicFile,
                             pub->generator_public_key, false);
  }
  if (status.ok()) {
    status = WriteFileAtomic(dir / kms::kProducerPublicFile,
                             pub->producer_public_key, false);
  }
  if (!status.ok()) return Fail(err, status);
  PrintJson(out, json{{"scheme", abe::SchemeName(pub->scheme)},
                      {"dir", a.out}});
  return kExitOk;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && absl::ascii_isspace(s.front())) s.remove_prefix(1);
  while (!s.empty() && absl::ascii_isspace(s.back())) s.remove_suffix(1);
  return s;
}

// Makes relative paths in the config file relative to its directory.
void ResolveConfigPaths(const fs::path& config,
                        std::map<std::string, std::string>& settings) {
  static const std::set<std::string> kPathKeys = {
      "params", "generator_public_key", "producer_public_key",
      "generator_secret_key", "producer_secret_key", "store"};
  const fs::path base = config.parent_path();
  for (auto& [key, value] : settings) {
    if (kPathKeys.contains(key) && !value.empty() &&
        fs::path(value).is_relative()) {
      value = (base / value).string();
    }
  }
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  switch (GetErrorCode(status).value_or(ErrorCode::kIo)) {
    case ErrorCode::kUsage:
      return kExitUsage;
    case ErrorCode::kUntrustedSbom:
    case ErrorCode::kSignatureRejected:
      return kExitUntrusted;
    case ErrorCode::kGeneratorProducerLied:
      return kExitLied;
    case ErrorCode::kEquivocation:
      return kExitSplitView;
    default:
      return kExitError;
  }
}

absl::StatusOr<std::map<std::string, std::string>> ParseConfig(
    std::string_view text) {
  std::map<std::string, std::string> settings;
  int line_number = 0;
  std::istringstream lines{std::string(text)};
  for (std::string raw; std::getline(lines, raw);) {
    ++line_number;
    std::string_view line = raw;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty() || line.front() == '[') continue;  // sections ignored
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return Error(ErrorCode::kUsage,
                   absl::StrCat("config line ", line_number,
                                ": expected key = value"));
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      return Error(ErrorCode::kUsage,
                   absl::StrCat("config line ", line_number, ": empty key"));
    }
    settings[key] = std::string(value);
  }
  return settings;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Petra confidential SBOM exchange", "petra"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Config file (default ./petra.toml)");
  app.add_option("--params", g.params, "CP-ABE public parameters");
  app.add_option("--gen-pub", g.gen_pub, "Generator public key");
  app.add_option("--prod-pub", g.prod_pub, "Producer public key");
  app.add_option("--gen-key", g.gen_key, "Generator signing key");
  app.add_option("--prod-key", g.prod_key, "Producer signing key");
  app.add_option("--store", g.store, "Distributor store directory");
  app.add_option("--kms", g.kms, "Key service URL");
  app.add_option("--now", g.now, "Current month YYYY-MM (default: today)");

  RedactArgs redact_args;
  uint64_t redact_seed = 0;
  auto* redact = app.add_subcommand("redact", "Redact and sign SBOMs");
  redact->add_option("--sbom", redact_args.sboms, "SPDX/CycloneDX input")
      ->required();
  redact->add_option("--embed", redact_args.embeds,
                     "Already-redacted container to nest");
  redact->add_option("--policy", redact_args.policy,
                     "Policy file or synthetic:complicated|simplistic")
      ->required();
  redact->add_option("--out", redact_args.out_dir, "Output directory");
  redact->add_option("--name", redact_args.name, "Output base name");
  auto* seed_option =
      redact->add_option("--seed", redact_seed, "Deterministic randomness");

  CountersignArgs countersign_args;
  auto* countersign =
      app.add_subcommand("countersign", "Endorse a redacted SBOM as producer");
  countersign->add_option("--sbom", countersign_args.sbom)->required();
  countersign->add_option("--plaintext", countersign_args.plaintext,
                          "Salt file written by redact")
      ->required();
  countersign->add_option("--out", countersign_args.out,
                          "Output (default: overwrite --sbom)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check signatures and sameness");
  verify->add_option("--sbom", verify_args.sbom)->required();
  auto* verify_plain =
      verify->add_option("--plaintext", verify_args.plaintext, "Salt file");
  verify->add_option("--key", verify_args.key, "Attribute key")
      ->excludes(verify_plain);
  verify->add_option("--field", verify_args.field, "Prove membership of");

  QueryArgs query_args;
  auto* query = app.add_subcommand("query", "Decrypt and select fields");
  query->add_option("--sbom", query_args.sbom)->required();
  query->add_option("--key", query_args.key)->required();
  query->add_option("--select", query_args.select, "Path selector");
  query->add_option("--format", query_args.format, "json | spdx | cyclonedx");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Describe a container");
  inspect->add_option("sbom", inspect_path)->required();

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Detect split views");
  compare->add_option("a", compare_args.a)->required();
  compare->add_option("b", compare_args.b)->required();
  compare->add_option("--purl", compare_args.purl,
                      "pURL both containers were served under");

  StoreArgs store_args;
  auto* store = app.add_subcommand("store", "Distributor store");
  store->require_subcommand(1);
  auto* publish = store->add_subcommand("publish", "Publish a container");
  publish->add_option("--sbom", store_args.sbom)->required();
  publish->add_option("--purl", store_args.purl);
  auto* fetch = store->add_subcommand("fetch", "Fetch a container");
  fetch->add_option("--purl", store_args.purl)->required();
  fetch->add_option("--out", store_args.out);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Storage and timing benchmark");
  bench->add_option("--corpus", bench_args.corpus)->required();
  bench->add_option("--policy", bench_args.policy)->required();
  bench->add_option("--csv", bench_args.csv, "CSV output (default stdout)");
  bench->add_option("--scheme", bench_args.scheme, "bsw | insecure-test");
  bench->add_option("--seed", bench_args.seed);

  CorpusArgs corpus_args;
  auto* corpus = app.add_subcommand("corpus", "Write a synthetic corpus");
  corpus->add_option("--out", corpus_args.out)->required();
  corpus->add_option("--count", corpus_args.count);
  corpus->add_option("--min", corpus_args.min_packages);
  corpus->add_option("--max", corpus_args.max_packages);
  corpus->add_option("--seed", corpus_args.seed);

  KeysArgs keys_args;
  auto* keys = app.add_subcommand("keys", "Key management");
  keys->require_subcommand(1);
  auto* keys_setup = keys->add_subcommand("setup", "Create key-service state");
  keys_setup->add_option("--state", keys_args.state)->required();
  keys_setup->add_option("--scheme", keys_args.scheme);
  keys_setup->add_option("--claim", keys_args.claims);
  auto* keys_issue = keys->add_subcommand("issue", "Obtain an attribute key");
  keys_issue->add_option("--token", keys_args.token, "Identity token");
  keys_issue->add_option("--state", keys_args.state, "Offline state dir");
  keys_issue->add_option("--attr", keys_args.attributes, "Offline attribute");
  keys_issue->add_option("--out", keys_args.out)->required();
  auto* keys_rotate = keys->add_subcommand("rotate", "Reissue monthly keys");
  auto* keys_params = keys->add_subcommand("params", "Fetch public material");
  keys_params->add_option("--out", keys_args.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string config = g.config;
  if (config.empty() && fs::exists(kDefaultConfig)) config = kDefaultConfig;
  if (!config.empty()) {
    auto text = ReadFileToString(config);
    if (!text.ok()) return Fail(err, text.status());
    auto settings = ParseConfig(*text);
    if (!settings.ok()) return Fail(err, settings.status());
    g.settings = *std::move(settings);
    ResolveConfigPaths(config, g.settings);
  }

  if (*redact) {
    if (seed_option->count() > 0) redact_args.seed = redact_seed;
    return RunRedact(g, redact_args, out, err);
  }
  if (*countersign) return RunCountersign(g, countersign_args, out, err);
  if (*verify) return RunVerify(g, verify_args, out, err);
  if (*query) return RunQuery(g, query_args, out, err);
  if (*inspect) return RunInspect(inspect_path, out, err);
  if (*compare) return RunCompare(compare_args, out, err);
  if (*publish) return RunStorePublish(g, store_args, out, err);
  if (*fetch) return RunStoreFetch(g, store_args, out, err);
  if (*bench) return RunBenchCommand(bench_args, out, err);
  if (*corpus) return RunCorpus(corpus_args, out, err);
  if (*keys_setup) return RunKeysSetup(keys_args, out, err);
  if (*keys_issue) return RunKeysIssue(g, keys_args, out, err);
  if (*keys_rotate) return RunKeysRotate(g, out, err);
  if (*keys_params) return RunKeysParams(g, keys_args, out, err);
  return kExitUsage;
}

}  // namespace petra::cli
