#pragma once

#include <cassert>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "raise/pattern.hpp"

namespace raise::dsl {

/// Parser finding with a 1-based source position.
struct ParseDiagnostic {
  int line = 1;
  int column = 1;
  std::string message;

  friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

namespace parse_detail {

/// Single-line cursor; columns are 1-based byte offsets.
class Cursor {
 public:
  Cursor(std::string_view line) : line_(line) {}

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }
  int column() {
    skip_ws();
    return static_cast<int>(pos_) + 1;
  }

  /// Next run of non-space, non-special characters.
  std::string_view word() {
    skip_ws();
    size_t begin = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t' &&
           line_[pos_] != ':' && line_[pos_] != '"' && line_[pos_] != '=')
      ++pos_;
    return line_.substr(begin, pos_ - begin);
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < line_.size() && line_[pos_] == c;
  }

  /// Double-quoted string with \" \\ and \n escapes.
  bool quoted(std::string& out, std::string& error) {
    skip_ws();
    if (pos_ >= line_.size() || line_[pos_] != '"') {
      error = "expected '\"'";
      return false;
    }
    ++pos_;
    out.clear();
    while (pos_ < line_.size()) {
      char c = line_[pos_++];
      if (c == '"') return true;
      if (c == '\\') {
        if (pos_ >= line_.size()) break;
        char esc = line_[pos_++];
        if (esc == 'n')
          out += '\n';
        else if (esc == '"' || esc == '\\')
          out += esc;
        else {
          error = std::string("unknown escape '\\") + esc + "'";
          return false;
        }
      } else {
        out += c;
      }
    }
    error = "unterminated string";
    return false;
  }

 private:
  std::string_view line_;
  size_t pos_ = 0;
};

inline std::string escape_string(std::string_view s) {
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

}  // namespace parse_detail

/// Parses the line-oriented pattern DSL:
///   pattern <name> v<version>
///   objective reject-dangerous | accept-safe | generic
///   param <name>: <Sort>[*] [optional]
///   node <id>: <Kind> "<statement>" [multiplicity over <param>]
///        [choice <min>..<max>] [undeveloped] [tag <key>="<value>"]...
///   edge <id> -supportedBy-> <id> | edge <id> -inContextOf-> <id>
/// '#' starts a whole-line comment. Nodes whose statement or tags contain
/// placeholders come back marked uninstantiated.
inline ParseResult<Pattern, ParseDiagnostic> parse_pattern(std::string_view source) {
  using parse_detail::Cursor;
  std::vector<ParseDiagnostic> diags;
  Pattern p;
  bool have_header = false;
  bool have_objective = false;
  std::map<std::string, int> node_lines;   // id -> first declaration line
  std::vector<std::pair<std::string, int>> param_lines;
  std::vector<std::pair<gsn::GsnEdge, int>> edge_lines;

  auto fail = [&](int line, int col, std::string msg) {
    diags.push_back({line, col, std::move(msg)});
  };

  int line_no = 0;
  size_t offset = 0;
  while (offset <= source.size()) {
    size_t eol = source.find('\n', offset);
    std::string_view raw = source.substr(
        offset, eol == std::string_view::npos ? source.size() - offset : eol - offset);
    offset = eol == std::string_view::npos ? source.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    Cursor cur(raw);
    if (cur.at_end()) continue;
    if (cur.peek_is('#')) continue;

    int kw_col = cur.column();
    std::string kw(cur.word());
    if (kw == "pattern") {
      if (have_header) {
        fail(line_no, kw_col, "duplicate 'pattern' header");
        continue;
      }
      have_header = true;
      int col = cur.column();
      std::string name(cur.word());
      if (name.empty()) {
        fail(line_no, col, "expected pattern name");
        continue;
      }
      p.name = name;
      col = cur.column();
      std::string ver(cur.word());
      if (ver.size() < 2 || ver[0] != 'v') {
        fail(line_no, col, "expected version 'v<text>'");
        continue;
      }
      p.version = ver.substr(1);
      if (!cur.at_end()) fail(line_no, cur.column(), "unexpected trailing text");
    } else if (kw == "objective") {
      int col = cur.column();
      std::string value(cur.word());
      auto obj = objective_from(value);
      if (!obj) {
        fail(line_no, col,
             "unknown objective '" + value + "' (expected reject-dangerous, accept-safe or generic)");
        continue;
      }
      if (have_objective) fail(line_no, kw_col, "duplicate 'objective' line");
      have_objective = true;
      p.objective = *obj;
      if (!cur.at_end()) fail(line_no, cur.column(), "unexpected trailing text");
    } else if (kw == "param") {
      HotSpot hs;
      int col = cur.column();
      std::string name(cur.word());
      if (name.empty()) {
        fail(line_no, col, "expected hot spot name");
        continue;
      }
      hs.name = name;
      if (!cur.consume(':')) {
        fail(line_no, cur.column(), "expected ':' after hot spot name");
        continue;
      }
      col = cur.column();
      std::string sort_word(cur.word());
      bool collection = false;
      if (!sort_word.empty() && sort_word.back() == '*') {
        collection = true;
        sort_word.pop_back();
      }
      auto sort = sort_from(sort_word);
      if (!sort) {
        fail(line_no, col, "unknown sort '" + sort_word + "'");
        continue;
      }
      hs.sort = *sort;
      hs.collection = collection;
      if (!cur.at_end()) {
        int opt_col = cur.column();
        std::string opt(cur.word());
        if (opt == "optional")
          hs.required = false;
        else
          fail(line_no, opt_col, "expected 'optional' or end of line");
      }
      if (!cur.at_end()) fail(line_no, cur.column(), "unexpected trailing text");
      param_lines.push_back({hs.name, line_no});
      p.params.push_back(std::move(hs));
    } else if (kw == "node") {
      TemplateNode tn;
      int col = cur.column();
      std::string id(cur.word());
      if (!gsn::valid_node_id(id)) {
        fail(line_no, col, "invalid node id '" + id + "'");
        continue;
      }
      if (node_lines.count(id)) {
        fail(line_no, col, "duplicate node id '" + id + "'");
        continue;
      }
      tn.node.id = id;
      if (!cur.consume(':')) {
        fail(line_no, cur.column(), "expected ':' after node id");
        continue;
      }
      col = cur.column();
      std::string kind_word(cur.word());
      auto kind = gsn::node_kind_from(kind_word);
      if (!kind) {
        fail(line_no, col, "unknown node kind '" + kind_word + "'");
        continue;
      }
      tn.node.kind = *kind;
      std::string stmt, str_err;
      if (!cur.quoted(stmt, str_err)) {
        fail(line_no, cur.column(), str_err + " for node statement");
        continue;
      }
      tn.node.statement = stmt;

      bool bad = false;
      while (!cur.at_end() && !bad) {
        int clause_col = cur.column();
        std::string clause(cur.word());
        if (clause == "multiplicity") {
          int over_col = cur.column();
          std::string over_kw(cur.word());
          if (over_kw != "over") {
            fail(line_no, over_col, "expected 'over' after 'multiplicity'");
            bad = true;
            break;
          }
          int name_col = cur.column();
          std::string over(cur.word());
          if (over.empty()) {
            fail(line_no, name_col, "expected hot spot name after 'multiplicity over'");
            bad = true;
            break;
          }
          if (tn.expansion.kind != ExpansionKind::None) {
            fail(line_no, clause_col, "node already has an expansion clause");
            bad = true;
            break;
          }
          tn.expansion = {ExpansionKind::Multiplicity, over, 0, 0};
        } else if (clause == "choice") {
          int bounds_col = cur.column();
          std::string bounds(cur.word());
          size_t dots = bounds.find("..");
          int lo = 0, hi = 0;
          bool ok = dots != std::string::npos;
          if (ok) {
            try {
              lo = std::stoi(bounds.substr(0, dots));
              hi = std::stoi(bounds.substr(dots + 2));
            } catch (...) {
              ok = false;
            }
          }
          if (!ok) {
            fail(line_no, bounds_col, "expected '<min>..<max>' after 'choice'");
            bad = true;
            break;
          }
          if (tn.expansion.kind != ExpansionKind::None) {
            fail(line_no, clause_col, "node already has an expansion clause");
            bad = true;
            break;
          }
          tn.expansion = {ExpansionKind::Choice, "", lo, hi};
        } else if (clause == "undeveloped") {
          tn.node.undeveloped = true;
        } else if (clause == "tag") {
          int key_col = cur.column();
          std::string key(cur.word());
          if (key.empty()) {
            fail(line_no, key_col, "expected tag key");
            bad = true;
            break;
          }
          if (!cur.consume('=')) {
            fail(line_no, cur.column(), "expected '=' after tag key");
            bad = true;
            break;
          }
          std::string value;
          if (!cur.quoted(value, str_err)) {
            fail(line_no, cur.column(), str_err + " for tag value");
            bad = true;
            break;
          }
          if (tn.node.tags.count(key)) {
            fail(line_no, key_col, "duplicate tag key '" + key + "'");
            bad = true;
            break;
          }
          tn.node.tags[key] = value;
        } else {
          fail(line_no, clause_col, "unknown node clause '" + clause + "'");
          bad = true;
        }
      }
      if (bad) continue;
      node_lines[id] = line_no;
      p.nodes.push_back(std::move(tn));
    } else if (kw == "edge") {
      int col = cur.column();
      std::string source_id(cur.word());
      if (source_id.empty()) {
        fail(line_no, col, "expected edge source id");
        continue;
      }
      col = cur.column();
      std::string arrow(cur.word());
      gsn::EdgeKind ek;
      if (arrow == "-supportedBy->")
        ek = gsn::EdgeKind::SupportedBy;
      else if (arrow == "-inContextOf->")
        ek = gsn::EdgeKind::InContextOf;
      else {
        fail(line_no, col, "expected '-supportedBy->' or '-inContextOf->'");
        continue;
      }
      col = cur.column();
      std::string target_id(cur.word());
      if (target_id.empty()) {
        fail(line_no, col, "expected edge target id");
        continue;
      }
      if (!cur.at_end()) fail(line_no, cur.column(), "unexpected trailing text");
      edge_lines.push_back({gsn::GsnEdge{source_id, target_id, ek}, line_no});
    } else {
      fail(line_no, kw_col, "unknown directive '" + kw + "'");
    }
  }

  if (!have_header) fail(1, 1, "expected 'pattern' header");

  // Cross-line checks with source positions.
  for (size_t i = 0; i < param_lines.size(); ++i)
    for (size_t j = i + 1; j < param_lines.size(); ++j)
      if (param_lines[i].first == param_lines[j].first)
        fail(param_lines[j].second, 1, "duplicate hot spot '" + param_lines[i].first + "'");

  for (const auto& [edge, line] : edge_lines) {
    if (!node_lines.count(edge.source))
      fail(line, 1, "edge references unknown node '" + edge.source + "'");
    if (!node_lines.count(edge.target))
      fail(line, 1, "edge references unknown node '" + edge.target + "'");
    p.edges.push_back(edge);
  }

  for (auto& tn : p.nodes) {
    int line = node_lines[tn.node.id];
    auto check_text = [&](const std::string& text) {
      auto scan = scan_placeholders(text);
      if (scan.bad_pos) fail(line, 1, scan.bad_reason);
      for (const auto& ref : scan.refs)
        if (!p.param(ref.name)) fail(line, 1, "undeclared placeholder '" + ref.name + "'");
      return !scan.refs.empty();
    };
    bool any = check_text(tn.node.statement);
    for (const auto& [key, value] : tn.node.tags) any = check_text(value) || any;
    tn.node.uninstantiated = any;
    if (tn.expansion.kind == ExpansionKind::Multiplicity) {
      const HotSpot* hs = p.param(tn.expansion.over);
      if (!hs)
        fail(line, 1, "multiplicity over undeclared hot spot '" + tn.expansion.over + "'");
      else if (!hs->collection)
        fail(line, 1, "multiplicity over non-collection hot spot '" + tn.expansion.over + "'");
    }
  }

  if (!diags.empty()) {
    std::sort(diags.begin(), diags.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
      return std::tie(a.line, a.column, a.message) < std::tie(b.line, b.column, b.message);
    });
    return diags;
  }
  p.canonicalize();
  return p;
}

/// Canonical renderer; parse(print(p)) == p for any valid pattern.
inline std::string print_pattern(const Pattern& p) {
  using parse_detail::escape_string;
  std::string out;
  out += "pattern " + p.name + " v" + p.version + "\n";
  out += std::string("objective ") + to_string(p.objective) + "\n";
  for (const auto& hs : p.params) {
    out += "param " + hs.name + ": " + to_string(hs.sort);
    if (hs.collection) out += "*";
    if (!hs.required) out += " optional";
    out += "\n";
  }
  for (const auto& tn : p.nodes) {
    out += "node " + tn.node.id + ": " + gsn::to_string(tn.node.kind) + " \"" +
           escape_string(tn.node.statement) + "\"";
    if (tn.expansion.kind == ExpansionKind::Multiplicity)
      out += " multiplicity over " + tn.expansion.over;
    if (tn.expansion.kind == ExpansionKind::Choice)
      out += " choice " + std::to_string(tn.expansion.choice_min) + ".." +
             std::to_string(tn.expansion.choice_max);
    if (tn.node.undeveloped) out += " undeveloped";
    for (const auto& [key, value] : tn.node.tags)
      out += " tag " + key + "=\"" + escape_string(value) + "\"";
    out += "\n";
  }
  for (const auto& e : p.edges) {
    out += "edge " + e.source +
           (e.kind == gsn::EdgeKind::SupportedBy ? " -supportedBy-> " : " -inContextOf-> ") +
           e.target + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in library: the RI (reject dangerous instructions) and AAI (accept
// adequate instructions) patterns. The shipped .pattern files are these same
// sources byte for byte.

inline const char* builtin_ri_source() {
  return
      "# Reject Instruction (RI) pattern.\n"
      "# Argues that a system rejects dangerous user instructions in every\n"
      "# identified operational scenario. Collection records bind per-scenario\n"
      "# fields: id, description, safety_goal, sg, he, evidence.\n"
      "pattern RI v1\n"
      "objective reject-dangerous\n"
      "param system: SystemName\n"
      "param scenario: Scenario*\n"
      "node G1: Goal \"{system} rejects dangerous user instructions in all identified operational scenarios\"\n"
      "node S1: Strategy \"Argument over each operational scenario\"\n"
      "node G2: Goal \"{system} rejects dangerous instructions when: {scenario.description}\" multiplicity over scenario tag scenario=\"{scenario.id}\"\n"
      "node G3: Goal \"{scenario.safety_goal}\" tag sg=\"{scenario.sg}\"\n"
      "node Sn1: Solution \"{scenario.evidence}\" tag he=\"{scenario.he}\"\n"
      "edge G1 -supportedBy-> S1\n"
      "edge S1 -supportedBy-> G2\n"
      "edge G2 -supportedBy-> G3\n"
      "edge G3 -supportedBy-> Sn1\n";
}

inline const char* builtin_aai_source() {
  return
      "# Accept Adequate Instructions (AAI) pattern.\n"
      "# Argues that a system accepts safe user instructions and achieves their\n"
      "# expected outcomes. Collection records bind per-event fields: id (safe\n"
      "# event), os (scenario id), description, instruction, outcome, evidence.\n"
      "pattern AAI v1\n"
      "objective accept-safe\n"
      "param outcome: Outcome\n"
      "param scenario: Scenario*\n"
      "param system: SystemName\n"
      "node G1: Goal \"{system} accepts and executes safe user instructions, achieving {outcome}\"\n"
      "node S1: Strategy \"Argument over each operational scenario\"\n"
      "node G2: Goal \"When {scenario.description}, {system} accepts the safe instruction: {scenario.instruction}\" multiplicity over scenario tag scenario=\"{scenario.os}\"\n"
      "node G3: Goal \"The expected outcome is achieved: {scenario.outcome}\"\n"
      "node Sn1: Solution \"{scenario.evidence}\" tag se=\"{scenario.id}\"\n"
      "edge G1 -supportedBy-> S1\n"
      "edge S1 -supportedBy-> G2\n"
      "edge G2 -supportedBy-> G3\n"
      "edge G3 -supportedBy-> Sn1\n";
}

/// The two built-in patterns, keyed "RI" and "AAI".
inline PatternLibrary builtin_library() {
  PatternLibrary lib;
  for (const char* source : {builtin_ri_source(), builtin_aai_source()}) {
    auto parsed = parse_pattern(source);
    assert(parsed.ok() && "built-in pattern must parse");
    Pattern p = std::move(parsed).value();
    lib.patterns.emplace(p.name, std::move(p));
  }
  return lib;
}

}  // namespace raise::dsl
