#pragma once

// Deterministic random generators for property tests. All take an explicit
// std::mt19937 so failures reproduce from the seed.

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "raise/builder.hpp"
#include "raise/gsn.hpp"
#include "raise/hara.hpp"
#include "raise/pattern.hpp"

namespace test_gen {

inline int pick(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(std::mt19937& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

/// Free text with the characters that stress escaping: quotes, backslashes,
/// braces, commas, newlines and some UTF-8.
inline std::string random_text(std::mt19937& rng, bool allow_newline = true) {
  static const std::vector<std::string> atoms = {
      "vehicle", "rejects",  "instruction", "scenario", "safe",   "speed",
      "\"quoted\"", "back\\slash", "{{brace}}", "comma, comma", "caf\xC3\xA9", "90%",
  };
  std::string out;
  int words = pick(rng, 1, 5);
  for (int i = 0; i < words; ++i) {
    if (i) out += (allow_newline && chance(rng, 0.1)) ? "\n" : " ";
    out += atoms[pick(rng, 0, static_cast<int>(atoms.size()) - 1)];
  }
  return out;
}

/// A graph that passes validate_graph in full-case mode (warnings allowed):
/// single Goal root, every node attached at creation, optional extra cross
/// edges added through add_edge (errors ignored), childless goals marked
/// undeveloped.
inline raise::gsn::ArgumentGraph random_valid_graph(std::mt19937& rng, int max_nodes = 30) {
  using namespace raise::gsn;
  std::vector<GsnNode> nodes;
  std::vector<GsnEdge> edges;

  auto make_node = [&](int index, NodeKind kind) {
    GsnNode n;
    n.id = std::string(1, "NGSCAJX"[static_cast<int>(kind) % 7]) + std::to_string(index);
    n.kind = kind;
    n.statement = random_text(rng);
    if (chance(rng, 0.3)) n.tags["note"] = random_text(rng, false);
    if (chance(rng, 0.1)) n.tags["he"] = "HE" + std::to_string(pick(rng, 1, 9));
    return n;
  };

  GsnNode root = make_node(0, NodeKind::Goal);
  root.id = "G0";
  nodes.push_back(root);

  const int count = pick(rng, 1, max_nodes);
  std::vector<std::string> support_parents{root.id};  // Goal/Strategy ids
  for (int i = 1; i <= count; ++i) {
    int kind_roll = pick(rng, 0, 9);
    NodeKind kind = kind_roll < 4   ? NodeKind::Goal
                    : kind_roll < 6 ? NodeKind::Strategy
                    : kind_roll < 8 ? NodeKind::Solution
                    : kind_roll < 9 ? NodeKind::Context
                                    : (chance(rng, 0.5) ? NodeKind::Assumption
                                                        : NodeKind::Justification);
    GsnNode n = make_node(i, kind);
    n.id = std::string(is_support_kind(kind) ? (kind == NodeKind::Goal     ? "G"
                                                : kind == NodeKind::Strategy ? "S"
                                                                             : "Sn")
                                             : "C") +
           std::to_string(i);
    const std::string& parent = support_parents[pick(
        rng, 0, static_cast<int>(support_parents.size()) - 1)];
    edges.push_back({parent, n.id,
                     is_support_kind(kind) ? EdgeKind::SupportedBy : EdgeKind::InContextOf});
    if (kind == NodeKind::Goal || kind == NodeKind::Strategy) support_parents.push_back(n.id);
    nodes.push_back(std::move(n));
  }

  auto graph = raise::gsn::ArgumentGraph::from_parts(std::move(nodes), std::move(edges));

  // Cross edges: keep whatever add_edge accepts.
  int extra = pick(rng, 0, 4);
  for (int i = 0; i < extra; ++i) {
    const auto& ns = graph.nodes();
    const GsnNode& a = ns[pick(rng, 0, static_cast<int>(ns.size()) - 1)];
    const GsnNode& b = ns[pick(rng, 0, static_cast<int>(ns.size()) - 1)];
    if (b.id == "G0") continue;  // keep the root unique
    auto added = raise::gsn::add_edge(graph, {a.id, b.id, EdgeKind::SupportedBy});
    if (added) graph = std::move(added).value();
  }

  // Goals without support become undeveloped; strategies are left as-is.
  std::vector<GsnNode> fixed = graph.nodes();
  for (auto& n : fixed) {
    if (n.kind != NodeKind::Goal) continue;
    bool supported = false;
    for (const auto& e : graph.edges())
      if (e.kind == EdgeKind::SupportedBy && e.source == n.id) supported = true;
    if (!supported) n.undeveloped = true;
  }
  return raise::gsn::ArgumentGraph::from_parts(std::move(fixed), graph.edges());
}

/// A HARA model that passes validate_hara at the given threshold: every
/// hazardous event at/above it gets a safety goal. With `ensure_buildable`
/// the model also has at least one top-priority event and one safe event,
/// which build_safety_case needs for its two multiplicity expansions.
inline raise::hara::HaraModel random_hara_model(std::mt19937& rng, raise::hara::Rating threshold,
                                                bool ensure_buildable = true) {
  using namespace raise::hara;
  HaraModel m;
  m.system_name = "Sys" + std::to_string(pick(rng, 1, 99));
  m.definition = random_text(rng, false);
  if (chance(rng, 0.7)) m.assumptions.push_back(random_text(rng, false));

  const int nf = pick(rng, 1, 4);
  for (int i = 1; i <= nf; ++i)
    m.functions.push_back({"SF" + std::to_string(i), random_text(rng, false)});
  if (chance(rng, 0.8)) m.functions.back().description += " reject instructions";

  for (int i = 1; i <= nf; ++i)
    m.malfunctions.push_back(
        {"MF" + std::to_string(i), "SF" + std::to_string(i), random_text(rng, false)});

  const int ns = pick(rng, 1, 12);
  for (int i = 1; i <= ns; ++i)
    m.scenarios.push_back({"OS" + std::to_string(i), random_text(rng, false)});

  int sg_counter = 0;
  const int nh = pick(rng, 1, 15);
  for (int i = 1; i <= nh; ++i) {
    HazardousEvent he;
    he.id = "HE" + std::to_string(i);
    he.malfunction_id = "MF" + std::to_string(pick(rng, 1, nf));
    he.scenario_id = "OS" + std::to_string(pick(rng, 1, ns));
    he.effect = random_text(rng, false);
    he.risk.severity = static_cast<Severity>(pick(rng, 0, 3));
    he.risk.exposure = static_cast<Exposure>(pick(rng, 0, 4));
    he.risk.controllability = static_cast<Controllability>(pick(rng, 0, 3));
    he.risk.rating = risk_rating(he.risk.severity, he.risk.exposure, he.risk.controllability);
    if (he.risk.rating >= threshold || chance(rng, 0.2)) {
      std::string sg_id = "SG" + std::to_string(++sg_counter);
      he.safety_goal_id = sg_id;
      m.safety_goals.push_back({sg_id, random_text(rng, false), he.risk.rating});
    }
    m.hazardous_events.push_back(std::move(he));
  }

  const int nse = pick(rng, 0, 10);
  for (int i = 1; i <= nse; ++i)
    m.safe_events.push_back({"SE" + std::to_string(i),
                             random_text(rng, false),
                             "OS" + std::to_string(pick(rng, 1, ns)),
                             random_text(rng, false)});

  if (ensure_buildable) {
    bool any_top = false;
    for (const auto& he : m.hazardous_events) any_top = any_top || he.risk.rating >= threshold;
    if (!any_top) {
      auto& he = m.hazardous_events.front();
      he.risk = {raise::hara::Severity::S3, raise::hara::Exposure::E4,
                 raise::hara::Controllability::C3, raise::hara::Rating::D};
      if (he.safety_goal_id.empty()) {
        std::string sg_id = "SG" + std::to_string(++sg_counter);
        he.safety_goal_id = sg_id;
        m.safety_goals.push_back({sg_id, random_text(rng, false), he.risk.rating});
      } else {
        for (auto& sg : m.safety_goals)
          if (sg.id == he.safety_goal_id && sg.priority < he.risk.rating)
            sg.priority = he.risk.rating;
      }
    }
    if (m.safe_events.empty())
      m.safe_events.push_back({"SE1", random_text(rng, false), "OS1", random_text(rng, false)});
  }

  // validate_hara only warns on unused scenarios; leave them possible.
  return m;
}

/// A pattern that parses, prints and validates cleanly (used for the
/// parse/print/parse round-trip property).
inline raise::dsl::Pattern random_pattern(std::mt19937& rng) {
  using namespace raise::dsl;
  using raise::gsn::EdgeKind;
  using raise::gsn::NodeKind;

  Pattern p;
  p.name = "P" + std::to_string(pick(rng, 1, 999));
  p.version = std::to_string(pick(rng, 1, 9));
  p.objective = chance(rng, 0.5) ? Objective::Generic
                : chance(rng, 0.5) ? Objective::RejectDangerous
                                   : Objective::AcceptSafe;

  const int nparams = pick(rng, 1, 4);
  for (int i = 0; i < nparams; ++i) {
    HotSpot hs;
    hs.name = "p" + std::to_string(i);
    hs.sort = static_cast<Sort>(pick(rng, 0, 5));
    hs.collection = chance(rng, 0.4);
    hs.required = chance(rng, 0.8);
    p.params.push_back(hs);
  }
  // The objective invariant needs a Scenario collection; force one.
  if (p.objective != Objective::Generic) {
    p.params[0].sort = Sort::Scenario;
    p.params[0].collection = true;
  }

  auto placeholder = [&](bool record_field) {
    const HotSpot& hs = p.params[pick(rng, 0, nparams - 1)];
    if (record_field && hs.collection && chance(rng, 0.7))
      return "{" + hs.name + ".field" + std::to_string(pick(rng, 0, 2)) + "}";
    return "{" + hs.name + "}";
  };

  // Root goal -> strategy -> leaf goal -> solution; optionally a
  // multiplicity goal over a collection param and a context node.
  auto add_node = [&](const std::string& id, NodeKind kind) {
    TemplateNode tn;
    tn.node.id = id;
    tn.node.kind = kind;
    tn.node.statement = random_text(rng, false);
    if (chance(rng, 0.6)) tn.node.statement += " " + placeholder(true);
    if (chance(rng, 0.2)) tn.node.tags["ref"] = placeholder(true);
    p.nodes.push_back(std::move(tn));
  };
  auto node_by_id = [&](const std::string& id) -> TemplateNode& {
    for (auto& tn : p.nodes)
      if (tn.node.id == id) return tn;
    throw std::logic_error("generator bug: missing node " + id);
  };

  add_node("G1", NodeKind::Goal);
  add_node("S1", NodeKind::Strategy);
  add_node("G2", NodeKind::Goal);
  add_node("Sn1", NodeKind::Solution);
  p.edges.push_back({"G1", "S1", EdgeKind::SupportedBy});
  p.edges.push_back({"S1", "G2", EdgeKind::SupportedBy});
  p.edges.push_back({"G2", "Sn1", EdgeKind::SupportedBy});

  if (chance(rng, 0.4)) {
    add_node("C1", NodeKind::Context);
    p.edges.push_back({"G1", "C1", EdgeKind::InContextOf});
  }
  if (chance(rng, 0.3)) {
    add_node("G3", NodeKind::Goal);
    node_by_id("G3").node.undeveloped = true;
    p.edges.push_back({"S1", "G3", EdgeKind::SupportedBy});
  }

  const HotSpot* collection = nullptr;
  for (const auto& hs : p.params)
    if (hs.collection) collection = &hs;
  if (collection && chance(rng, 0.7))
    node_by_id("G2").expansion = {ExpansionKind::Multiplicity, collection->name, 0, 0};

  // Mark template placeholders the way the parser would.
  for (auto& tn : p.nodes) {
    bool any = has_placeholders(tn.node.statement);
    for (const auto& [k, v] : tn.node.tags) any = any || has_placeholders(v);
    tn.node.uninstantiated = any;
  }

  p.canonicalize();
  return p;
}

/// Random bytes for fuzzing, biased toward structure-looking input.
inline std::string random_bytes(std::mt19937& rng, size_t max_len) {
  static const std::string structured =
      "pattern node edge param objective {}\"\\:*v1 -supportedBy-> \n\t{\"nodes\":[]}";
  std::string out;
  size_t len = std::uniform_int_distribution<size_t>(0, max_len)(rng);
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    if (chance(rng, 0.7))
      out += structured[pick(rng, 0, static_cast<int>(structured.size()) - 1)];
    else
      out += static_cast<char>(pick(rng, 0, 255));
  }
  return out;
}

}  // namespace test_gen
