#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "raise/diag.hpp"
#include "raise/gsn.hpp"
#include "raise/json_guard.hpp"

namespace raise::emit {

/// system_name plus the graph: everything a .gsn.json document carries.
struct ExchangeDocument {
  std::string system_name;
  gsn::ArgumentGraph graph;
};

/// Canonical exchange text: UTF-8, LF, two-space indent, fixed key order
/// (format_version, system_name, nodes, edges), nodes sorted by id, edges by
/// (source, target, kind), tags by key. Emitting the same graph twice, or
/// the same graph built in a different insertion order, yields identical
/// bytes. The graph must validate without errors.
inline Result<std::string> emit_exchange(const gsn::ArgumentGraph& g,
                                         const std::string& system_name) {
  if (has_errors(gsn::validate_graph(g, gsn::GraphMode::FullCase)))
    return Error{Errc::InvalidGraph, "graph fails validation; refusing to serialize"};

  nlohmann::ordered_json doc;
  doc["format_version"] = "1";
  doc["system_name"] = system_name;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes()) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = gsn::to_string(n.kind);
    jn["statement"] = n.statement;
    jn["undeveloped"] = n.undeveloped;
    jn["uninstantiated"] = n.uninstantiated;
    jn["tags"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : n.tags) jn["tags"][key] = value;
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json je;
    je["source"] = e.source;
    je["target"] = e.target;
    je["kind"] = gsn::to_string(e.kind);
    doc["edges"].push_back(std::move(je));
  }
  // error_handler replace: statements come from user CSVs, which are not
  // guaranteed to be valid UTF-8; emission must stay total and deterministic.
  return doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

/// Strict loader for the canonical format. Structural problems come back as
/// EXC001 (malformed document) or EXC002 (unsupported format_version);
/// documents that decode but encode an ill-formed graph come back as the
/// graph validator's error diagnostics.
inline ParseResult<ExchangeDocument> load_exchange_document(std::string_view text) {
  std::vector<Diagnostic> diags;
  auto fail = [&](std::string message, std::string locus = {}) {
    diags.push_back(err("EXC001", std::move(message), std::move(locus)));
    return diags;
  };

  if (raise::detail::json_nesting_too_deep(text, 256)) return fail("document nesting is too deep");
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return fail("document is not valid JSON");
  if (!doc.is_object()) return fail("document root must be an object");

  for (const auto& [key, value] : doc.items())
    if (key != "format_version" && key != "system_name" && key != "nodes" && key != "edges")
      return fail("unknown document key '" + key + "'");
  if (!doc.contains("format_version") || !doc["format_version"].is_string())
    return fail("format_version is missing or not a string");
  if (doc["format_version"] != "1") {
    diags.push_back(err("EXC002", "unsupported format_version '" +
                                      doc["format_version"].get<std::string>() + "'"));
    return diags;
  }
  if (!doc.contains("system_name") || !doc["system_name"].is_string())
    return fail("system_name is missing or not a string");
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    return fail("nodes is missing or not an array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    return fail("edges is missing or not an array");

  ExchangeDocument out;
  out.system_name = doc["system_name"].get<std::string>();

  std::vector<gsn::GsnNode> nodes;
  for (size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& jn = doc["nodes"][i];
    const std::string locus = "nodes[" + std::to_string(i) + "]";
    if (!jn.is_object()) return fail("node entry must be an object", locus);
    for (const auto& [key, value] : jn.items())
      if (key != "id" && key != "kind" && key != "statement" && key != "undeveloped" &&
          key != "uninstantiated" && key != "tags")
        return fail("unknown node key '" + key + "'", locus);
    if (!jn.contains("id") || !jn["id"].is_string()) return fail("node id must be a string", locus);
    if (!jn.contains("kind") || !jn["kind"].is_string())
      return fail("node kind must be a string", locus);
    auto kind = gsn::node_kind_from(jn["kind"].get<std::string>());
    if (!kind)
      return fail("unknown node kind '" + jn["kind"].get<std::string>() + "'", locus);
    if (!jn.contains("statement") || !jn["statement"].is_string())
      return fail("node statement must be a string", locus);
    if (!jn.contains("undeveloped") || !jn["undeveloped"].is_boolean())
      return fail("node undeveloped must be a boolean", locus);
    if (!jn.contains("uninstantiated") || !jn["uninstantiated"].is_boolean())
      return fail("node uninstantiated must be a boolean", locus);
    if (!jn.contains("tags") || !jn["tags"].is_object())
      return fail("node tags must be an object", locus);
    gsn::GsnNode n;
    n.id = jn["id"].get<std::string>();
    n.kind = *kind;
    n.statement = jn["statement"].get<std::string>();
    n.undeveloped = jn["undeveloped"].get<bool>();
    n.uninstantiated = jn["uninstantiated"].get<bool>();
    for (const auto& [key, value] : jn["tags"].items()) {
      if (!value.is_string()) return fail("tag '" + key + "' must be a string", locus);
      n.tags[key] = value.get<std::string>();
    }
    nodes.push_back(std::move(n));
  }

  std::vector<gsn::GsnEdge> edges;
  for (size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& je = doc["edges"][i];
    const std::string locus = "edges[" + std::to_string(i) + "]";
    if (!je.is_object()) return fail("edge entry must be an object", locus);
    for (const auto& [key, value] : je.items())
      if (key != "source" && key != "target" && key != "kind")
        return fail("unknown edge key '" + key + "'", locus);
    if (!je.contains("source") || !je["source"].is_string())
      return fail("edge source must be a string", locus);
    if (!je.contains("target") || !je["target"].is_string())
      return fail("edge target must be a string", locus);
    if (!je.contains("kind") || !je["kind"].is_string())
      return fail("edge kind must be a string", locus);
    auto kind = gsn::edge_kind_from(je["kind"].get<std::string>());
    if (!kind)
      return fail("unknown edge kind '" + je["kind"].get<std::string>() + "'", locus);
    edges.push_back({je["source"].get<std::string>(), je["target"].get<std::string>(), *kind});
  }

  out.graph = gsn::ArgumentGraph::from_parts(std::move(nodes), std::move(edges));

  auto findings = gsn::validate_graph(out.graph, gsn::GraphMode::FullCase);
  std::vector<Diagnostic> graph_errors;
  for (auto& d : findings)
    if (d.severity == Severity::Error) graph_errors.push_back(std::move(d));
  if (!graph_errors.empty()) return graph_errors;

  return out;
}

inline ParseResult<gsn::ArgumentGraph> load_exchange(std::string_view text) {
  auto doc = load_exchange_document(text);
  if (!doc) return doc.diagnostics();
  return std::move(doc).value().graph;
}

}  // namespace raise::emit
