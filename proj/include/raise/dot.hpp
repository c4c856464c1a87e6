#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "raise/gsn.hpp"

namespace raise::emit {

namespace dot_detail {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

/// Greedy word wrap at 28 bytes per line; single words longer than the
/// limit are hard-split. The wrap width is part of the byte contract.
inline std::vector<std::string> wrap(std::string_view text, size_t width = 28) {
  std::vector<std::string> lines;
  std::string current;
  size_t i = 0;
  auto flush = [&] {
    if (!current.empty()) {
      lines.push_back(current);
      current.clear();
    }
  };
  while (i < text.size()) {
    size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\n') ++j;
    std::string_view word = text.substr(i, j - i);
    while (word.size() > width) {
      flush();
      lines.push_back(std::string(word.substr(0, width)));
      word.remove_prefix(width);
    }
    if (!word.empty()) {
      size_t needed = current.empty() ? word.size() : current.size() + 1 + word.size();
      if (needed > width) flush();
      if (!current.empty()) current += ' ';
      current += word;
    }
    if (j < text.size() && text[j] == '\n') flush();
    i = j + (j < text.size() ? 1 : 0);
  }
  flush();
  if (lines.empty()) lines.push_back("");
  return lines;
}

inline std::string shape_attrs(gsn::NodeKind kind) {
  switch (kind) {
    case gsn::NodeKind::Goal: return "shape=box";
    case gsn::NodeKind::Strategy: return "shape=parallelogram";
    case gsn::NodeKind::Solution: return "shape=circle";
    case gsn::NodeKind::Context: return "shape=box, style=rounded";
    case gsn::NodeKind::Assumption: return "shape=ellipse";
    case gsn::NodeKind::Justification: return "shape=ellipse";
  }
  return "shape=box";
}

}  // namespace dot_detail

/// Deterministic DOT rendering using the GSN shape conventions: Goal=box,
/// Strategy=parallelogram, Solution=circle, Context=rounded box,
/// Assumption/Justification=ellipse with an A/J marker line. Undeveloped
/// nodes get a diamond marker line. SupportedBy is a solid arrow,
/// InContextOf an open arrowhead. Nodes and edges are emitted in canonical
/// (id-sorted) order.
inline std::string emit_dot(const gsn::ArgumentGraph& g) {
  using dot_detail::escape;
  std::string out;
  out += "digraph gsn {\n";
  out += "  graph [rankdir=TB];\n";
  out += "  node [fontname=\"Helvetica\"];\n";
  for (const auto& n : g.nodes()) {
    std::string label = n.id;
    for (const auto& line : dot_detail::wrap(n.statement)) label += "\n" + line;
    if (n.kind == gsn::NodeKind::Assumption) label += "\nA";
    if (n.kind == gsn::NodeKind::Justification) label += "\nJ";
    if (n.undeveloped) label += "\n\xE2\x97\x87";  // white diamond marker
    out += "  \"" + escape(n.id) + "\" [" + dot_detail::shape_attrs(n.kind) + ", label=\"" +
           escape(label) + "\"];\n";
  }
  for (const auto& e : g.edges()) {
    out += "  \"" + escape(e.source) + "\" -> \"" + escape(e.target) + "\"";
    if (e.kind == gsn::EdgeKind::InContextOf) out += " [arrowhead=onormal]";
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace raise::emit
