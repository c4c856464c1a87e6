#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "raise/diag.hpp"
#include "raise/gsn.hpp"

namespace raise::dsl {

enum class Sort { Scenario, Instruction, Outcome, SystemName, EvidenceRef, FreeText };

inline const char* to_string(Sort s) {
  switch (s) {
    case Sort::Scenario: return "Scenario";
    case Sort::Instruction: return "Instruction";
    case Sort::Outcome: return "Outcome";
    case Sort::SystemName: return "SystemName";
    case Sort::EvidenceRef: return "EvidenceRef";
    case Sort::FreeText: return "FreeText";
  }
  return "FreeText";
}

inline std::optional<Sort> sort_from(std::string_view s) {
  if (s == "Scenario") return Sort::Scenario;
  if (s == "Instruction") return Sort::Instruction;
  if (s == "Outcome") return Sort::Outcome;
  if (s == "SystemName") return Sort::SystemName;
  if (s == "EvidenceRef") return Sort::EvidenceRef;
  if (s == "FreeText") return Sort::FreeText;
  return std::nullopt;
}

/// A pattern parameter. Collection hot spots bind to ordered record lists
/// and drive Multiplicity expansion; scalar ones bind to plain text.
struct HotSpot {
  std::string name;
  Sort sort = Sort::FreeText;
  bool collection = false;
  bool required = true;

  friend bool operator==(const HotSpot&, const HotSpot&) = default;
};

enum class ExpansionKind { None, Multiplicity, Choice };

struct Expansion {
  ExpansionKind kind = ExpansionKind::None;
  std::string over;    // Multiplicity: collection hot-spot name
  int choice_min = 0;  // Choice bounds over the node's SupportedBy children
  int choice_max = 0;

  friend bool operator==(const Expansion&, const Expansion&) = default;
};

/// GSN node whose statement and tag values may contain placeholders.
struct TemplateNode {
  gsn::GsnNode node;
  Expansion expansion;

  friend bool operator==(const TemplateNode&, const TemplateNode&) = default;
};

enum class Objective { RejectDangerous, AcceptSafe, Generic };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::RejectDangerous: return "reject-dangerous";
    case Objective::AcceptSafe: return "accept-safe";
    case Objective::Generic: return "generic";
  }
  return "generic";
}

inline std::optional<Objective> objective_from(std::string_view s) {
  if (s == "reject-dangerous") return Objective::RejectDangerous;
  if (s == "accept-safe") return Objective::AcceptSafe;
  if (s == "generic") return Objective::Generic;
  return std::nullopt;
}

/// A parameterized GSN subtree. Storage is canonical (params by name,
/// nodes by id, edges by tuple) so equality is structural.
struct Pattern {
  std::string name;
  std::string version;
  Objective objective = Objective::Generic;
  std::vector<HotSpot> params;
  std::vector<TemplateNode> nodes;
  std::vector<gsn::GsnEdge> edges;

  const HotSpot* param(std::string_view name_) const {
    for (const auto& p : params)
      if (p.name == name_) return &p;
    return nullptr;
  }
  const TemplateNode* find(std::string_view id) const {
    for (const auto& n : nodes)
      if (n.node.id == id) return &n;
    return nullptr;
  }

  void canonicalize() {
    std::stable_sort(params.begin(), params.end(),
                     [](const HotSpot& a, const HotSpot& b) { return a.name < b.name; });
    std::stable_sort(nodes.begin(), nodes.end(),
                     [](const TemplateNode& a, const TemplateNode& b) {
                       return a.node.id < b.node.id;
                     });
    std::stable_sort(edges.begin(), edges.end());
  }

  /// The template as a plain argument graph (expansion annotations dropped,
  /// placeholders left verbatim).
  gsn::ArgumentGraph as_graph() const {
    std::vector<gsn::GsnNode> ns;
    for (const auto& n : nodes) ns.push_back(n.node);
    return gsn::ArgumentGraph::from_parts(std::move(ns), edges);
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct PatternLibrary {
  std::map<std::string, Pattern> patterns;

  const Pattern* find(std::string_view name) const {
    auto it = patterns.find(std::string(name));
    return it == patterns.end() ? nullptr : &it->second;
  }
};

// ---------------------------------------------------------------------------
// Placeholder syntax: {name} or {name.field}; literal '{' written as '{{'.

struct PlaceholderRef {
  std::string name;
  std::string field;  // empty for bare {name}
  size_t pos = 0;     // byte offset of the opening brace

  friend bool operator==(const PlaceholderRef&, const PlaceholderRef&) = default;
};

struct PlaceholderScan {
  std::vector<PlaceholderRef> refs;
  std::optional<size_t> bad_pos;
  std::string bad_reason;
};

namespace detail {
inline bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
}  // namespace detail

inline PlaceholderScan scan_placeholders(std::string_view text) {
  PlaceholderScan out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    if (i + 1 < text.size() && text[i + 1] == '{') {
      ++i;
      continue;
    }
    size_t j = i + 1;
    if (j >= text.size() || !detail::ident_start(text[j])) {
      out.bad_pos = i;
      out.bad_reason = "expected placeholder name after '{'";
      return out;
    }
    size_t name_begin = j;
    while (j < text.size() && detail::ident_char(text[j])) ++j;
    PlaceholderRef ref;
    ref.name = std::string(text.substr(name_begin, j - name_begin));
    ref.pos = i;
    if (j < text.size() && text[j] == '.') {
      ++j;
      size_t field_begin = j;
      if (j >= text.size() || !detail::ident_start(text[j])) {
        out.bad_pos = i;
        out.bad_reason = "expected field name after '.'";
        return out;
      }
      while (j < text.size() && detail::ident_char(text[j])) ++j;
      ref.field = std::string(text.substr(field_begin, j - field_begin));
    }
    if (j >= text.size() || text[j] != '}') {
      out.bad_pos = i;
      out.bad_reason = "unterminated placeholder (expected '}')";
      return out;
    }
    out.refs.push_back(std::move(ref));
    i = j;
  }
  return out;
}

inline bool has_placeholders(std::string_view text) {
  auto scan = scan_placeholders(text);
  return !scan.refs.empty() || scan.bad_pos.has_value();
}

/// Rewrites `text`, replacing each placeholder through `resolve(name, field)`.
/// A nullopt resolution leaves the placeholder verbatim and reports it via
/// the returned flag; '{{' always unescapes to '{'.
template <class Resolver>
inline std::pair<std::string, bool> substitute_placeholders(std::string_view text,
                                                            Resolver&& resolve) {
  std::string out;
  bool left = false;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') {
      out += text[i];
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '{') {
      out += '{';
      ++i;
      continue;
    }
    size_t j = i + 1;
    size_t name_begin = j;
    while (j < text.size() && detail::ident_char(text[j])) ++j;
    std::string name(text.substr(name_begin, j - name_begin));
    std::string field;
    if (j < text.size() && text[j] == '.') {
      size_t field_begin = ++j;
      while (j < text.size() && detail::ident_char(text[j])) ++j;
      field = std::string(text.substr(field_begin, j - field_begin));
    }
    if (name.empty() || j >= text.size() || text[j] != '}') {
      out += text[i];  // malformed; copy through (validation reports it)
      continue;
    }
    if (auto value = resolve(name, field)) {
      out += *value;
    } else {
      out += text.substr(i, j - i + 1);
      left = true;
    }
    i = j;
  }
  return {std::move(out), left};
}

// ---------------------------------------------------------------------------

/// Pattern-level lint. Graph rules run in fragment mode (minus the
/// uninstantiated-node warning, which is the normal state of a template).
/// Pattern rule codes:
///   PAT020 unused hot spot (warning)     PAT025 duplicate hot-spot name
///   PAT021 Multiplicity on non-Goal/     PAT026 Multiplicity over unknown or
///          Strategy node                        non-collection hot spot
///   PAT022 bad Choice bounds             PAT027 nested Multiplicity
///   PAT023 reject/accept objective       PAT028 malformed placeholder
///          without a Scenario collection PAT029 Multiplicity on the root
///   PAT024 undeclared placeholder               (expansion would multiply it)
inline std::vector<Diagnostic> validate_pattern(const Pattern& p) {
  std::vector<Diagnostic> out;

  for (auto d : gsn::validate_graph(p.as_graph(), gsn::GraphMode::Fragment))
    if (d.code != "GSN021") out.push_back(std::move(d));

  for (size_t i = 0; i < p.params.size(); ++i)
    for (size_t j = i + 1; j < p.params.size(); ++j)
      if (p.params[i].name == p.params[j].name)
        out.push_back(err("PAT025", "duplicate hot spot '" + p.params[i].name + "'",
                          p.params[i].name));

  std::set<std::string> referenced;
  auto scan_text = [&](const std::string& text, const std::string& locus) {
    auto scan = scan_placeholders(text);
    if (scan.bad_pos)
      out.push_back(err("PAT028", scan.bad_reason, locus));
    for (const auto& ref : scan.refs) {
      referenced.insert(ref.name);
      if (!p.param(ref.name))
        out.push_back(err("PAT024", "undeclared placeholder '" + ref.name + "'", locus));
    }
  };

  for (const auto& tn : p.nodes) {
    scan_text(tn.node.statement, tn.node.id);
    for (const auto& [key, value] : tn.node.tags) scan_text(value, tn.node.id);

    if (tn.expansion.kind == ExpansionKind::Multiplicity) {
      if (tn.node.kind != gsn::NodeKind::Goal && tn.node.kind != gsn::NodeKind::Strategy)
        out.push_back(err("PAT021", "multiplicity is only allowed on Goal or Strategy nodes",
                          tn.node.id));
      const HotSpot* hs = p.param(tn.expansion.over);
      if (!hs || !hs->collection)
        out.push_back(err("PAT026", "multiplicity over '" + tn.expansion.over +
                                        "', which is not a collection hot spot",
                          tn.node.id));
      else
        referenced.insert(tn.expansion.over);
    }
    if (tn.expansion.kind == ExpansionKind::Choice) {
      int alternatives = 0;
      for (const auto& e : p.edges)
        if (e.kind == gsn::EdgeKind::SupportedBy && e.source == tn.node.id) ++alternatives;
      if (tn.expansion.choice_min < 1 || tn.expansion.choice_min > tn.expansion.choice_max ||
          tn.expansion.choice_max > alternatives)
        out.push_back(err("PAT022",
                          "choice bounds " + std::to_string(tn.expansion.choice_min) + ".." +
                              std::to_string(tn.expansion.choice_max) + " do not satisfy 1 <= min "
                              "<= max <= " + std::to_string(alternatives) + " alternatives",
                          tn.node.id));
    }
  }

  // Nested multiplicity is not expandable, and a multiplied root could
  // never satisfy the single-root fragment rule.
  const auto root_ids = gsn::roots(p.as_graph());
  for (const auto& tn : p.nodes) {
    if (tn.expansion.kind != ExpansionKind::Multiplicity) continue;
    if (std::find(root_ids.begin(), root_ids.end(), tn.node.id) != root_ids.end())
      out.push_back(err("PAT029", "multiplicity on the pattern root '" + tn.node.id + "'",
                        tn.node.id));
    auto subtree = gsn::descendants(p.as_graph(), tn.node.id);
    for (const auto& other : p.nodes)
      if (other.node.id != tn.node.id && other.expansion.kind == ExpansionKind::Multiplicity &&
          subtree.count(other.node.id))
        out.push_back(err("PAT027", "multiplicity node '" + other.node.id +
                                        "' is nested inside multiplicity node '" + tn.node.id + "'",
                          other.node.id));
  }

  if (p.objective == Objective::RejectDangerous || p.objective == Objective::AcceptSafe) {
    bool has_scenario_collection = std::any_of(
        p.params.begin(), p.params.end(),
        [](const HotSpot& h) { return h.sort == Sort::Scenario && h.collection; });
    if (!has_scenario_collection)
      out.push_back(err("PAT023", std::string(to_string(p.objective)) +
                                      " pattern must declare a Scenario-sorted collection hot spot",
                        p.name));
  }

  for (const auto& hs : p.params)
    if (!referenced.count(hs.name))
      out.push_back(warn("PAT020", "hot spot '" + hs.name +
                                       "' is never referenced by a statement, tag or expansion",
                         hs.name));

  sort_diagnostics(out);
  return out;
}

}  // namespace raise::dsl
