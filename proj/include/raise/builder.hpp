#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "raise/gsn.hpp"
#include "raise/hara.hpp"
#include "raise/json_guard.hpp"
#include "raise/pattern.hpp"
#include "raise/pattern_dsl.hpp"

namespace raise::build {

/// One collection element: field name -> value.
using Record = std::map<std::string, std::string>;

/// Concrete values for one pattern instantiation.
struct BindingSet {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<Record>> collections;
};

struct PatternNames {
  std::string reject = "RI";
  std::string accept = "AAI";
  friend bool operator==(const PatternNames&, const PatternNames&) = default;
};

struct BuildConfig {
  std::string system_name;  // falls back to the HARA model's name when empty
  std::vector<std::string> contexts;
  std::vector<std::string> assumptions;
  hara::Rating priority_threshold = hara::Rating::C;
  PatternNames patterns;
  std::map<std::string, std::string> id_prefixes = {{"reject", "RI."}, {"accept", "AAI."}};

  std::string prefix(const std::string& branch) const {
    auto it = id_prefixes.find(branch);
    return it == id_prefixes.end() ? branch + "." : it->second;
  }

  friend bool operator==(const BuildConfig&, const BuildConfig&) = default;
};

/// Loads the flat JSON config object: system_name, contexts, assumptions,
/// priority_threshold, reject_pattern, accept_pattern. Every key is optional.
inline ParseResult<BuildConfig> load_config(std::string_view text) {
  std::vector<Diagnostic> diags;
  // A flat object never nests deeply; cap it before the recursive parse.
  if (raise::detail::json_nesting_too_deep(text, 16)) {
    diags.push_back(err("CFG001", "config must be a JSON object", "build config"));
    return diags;
  }
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    diags.push_back(err("CFG001", "config must be a JSON object", "build config"));
    return diags;
  }
  BuildConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "system_name" && value.is_string()) {
      cfg.system_name = value.get<std::string>();
    } else if ((key == "contexts" || key == "assumptions") && value.is_array()) {
      auto& target = key == "contexts" ? cfg.contexts : cfg.assumptions;
      for (const auto& item : value) {
        if (!item.is_string()) {
          diags.push_back(err("CFG002", key + " must be an array of strings", key));
          break;
        }
        target.push_back(item.get<std::string>());
      }
    } else if (key == "priority_threshold" && value.is_string()) {
      auto r = hara::rating_from(value.get<std::string>());
      if (!r) {
        diags.push_back(err("CFG003", "priority_threshold must be QM, A, B, C or D", key));
        continue;
      }
      cfg.priority_threshold = *r;
    } else if (key == "reject_pattern" && value.is_string()) {
      cfg.patterns.reject = value.get<std::string>();
    } else if (key == "accept_pattern" && value.is_string()) {
      cfg.patterns.accept = value.get<std::string>();
    } else {
      diags.push_back(err("CFG004", "unknown or mistyped config key '" + key + "'", key));
    }
  }
  if (!diags.empty()) return diags;
  return cfg;
}

namespace detail {

inline std::optional<std::string> resolve_in(const BindingSet& b, const Record* element,
                                             const std::string& collection_name,
                                             const std::string& name, const std::string& field) {
  if (auto it = b.scalars.find(name); it != b.scalars.end()) {
    if (field.empty()) return it->second;
    return std::nullopt;  // field access on a scalar is reported separately
  }
  if (element && name == collection_name) {
    const std::string key = field.empty() ? "id" : field;
    if (auto it = element->find(key); it != element->end()) return it->second;
    return std::nullopt;  // missing record field: leave the hot spot unbound
  }
  return std::nullopt;
}

}  // namespace detail

/// Instantiates a pattern: replaces placeholders with bindings, replicates
/// each Multiplicity subtree once per collection element (ids suffixed .1,
/// .2, ... in binding order) and prefixes every id with `id_prefix`.
/// Placeholders whose binding or record field is absent stay verbatim and
/// leave the node marked uninstantiated; Choice nodes keep all alternatives
/// and stay uninstantiated (the selection is a later editorial step).
inline Result<gsn::ArgumentGraph> instantiate_pattern(const dsl::Pattern& p, const BindingSet& b,
                                                      const std::string& id_prefix) {
  if (has_errors(dsl::validate_pattern(p)))
    return Error{Errc::InvalidPattern, "pattern '" + p.name + "' fails validation"};

  // Required hot spots must be bound; field access on scalars is an error.
  for (const auto& hs : p.params) {
    const bool bound = hs.collection ? b.collections.count(hs.name) > 0
                                     : b.scalars.count(hs.name) > 0;
    if (hs.required && !bound)
      return Error{Errc::MissingBinding, "required hot spot '" + hs.name + "' is unbound"};
  }
  for (const auto& tn : p.nodes) {
    auto check = [&](const std::string& text) -> std::optional<Error> {
      for (const auto& ref : dsl::scan_placeholders(text).refs)
        if (!ref.field.empty() && b.scalars.count(ref.name))
          return Error{Errc::PlaceholderFieldUnknown,
                       "'" + ref.name + "' is a scalar binding; field '." + ref.field +
                           "' does not exist"};
      return std::nullopt;
    };
    if (auto e = check(tn.node.statement)) return *e;
    for (const auto& [key, value] : tn.node.tags)
      if (auto e = check(value)) return *e;
  }

  // Multiplicity nodes and the subtrees they replicate.
  const gsn::ArgumentGraph template_graph = p.as_graph();
  std::map<std::string, std::set<std::string>> subtree_of;  // mult node -> member ids
  std::map<std::string, std::string> member_of;             // member id -> mult node
  for (const auto& tn : p.nodes) {
    if (tn.expansion.kind != dsl::ExpansionKind::Multiplicity) continue;
    auto it = b.collections.find(tn.expansion.over);
    if (it == b.collections.end())
      return Error{Errc::MissingBinding,
                   "multiplicity over unbound collection '" + tn.expansion.over + "'"};
    if (it->second.empty())
      return Error{Errc::EmptyCollection,
                   "collection '" + tn.expansion.over + "' is empty; multiplicity node '" +
                       tn.node.id + "' needs at least one element"};
    auto members = gsn::descendants(template_graph, tn.node.id);
    for (const auto& m : members) {
      auto [it2, inserted] = member_of.emplace(m, tn.node.id);
      if (!inserted)
        return Error{Errc::InvalidPattern, "multiplicity subtrees of '" + it2->second + "' and '" +
                                               tn.node.id + "' overlap at '" + m + "'"};
    }
    subtree_of[tn.node.id] = std::move(members);
  }

  auto substitute_node = [&](const dsl::TemplateNode& tn, const Record* element,
                             const std::string& collection_name) {
    gsn::GsnNode node = tn.node;
    auto resolver = [&](const std::string& name, const std::string& field) {
      return detail::resolve_in(b, element, collection_name, name, field);
    };
    bool unresolved = false;
    auto [stmt, stmt_left] = dsl::substitute_placeholders(node.statement, resolver);
    node.statement = std::move(stmt);
    unresolved = unresolved || stmt_left;
    for (auto& [key, value] : node.tags) {
      auto [text, left] = dsl::substitute_placeholders(value, resolver);
      value = std::move(text);
      unresolved = unresolved || left;
    }
    node.uninstantiated = unresolved || tn.expansion.kind == dsl::ExpansionKind::Choice;
    return node;
  };

  std::vector<gsn::GsnNode> nodes;
  std::vector<gsn::GsnEdge> edges;

  // Non-replicated nodes.
  for (const auto& tn : p.nodes)
    if (!member_of.count(tn.node.id)) nodes.push_back(substitute_node(tn, nullptr, ""));

  // Replicated subtrees, one copy per element in binding order.
  for (const auto& [mult_id, members] : subtree_of) {
    const dsl::TemplateNode* mult = p.find(mult_id);
    const auto& elements = b.collections.at(mult->expansion.over);
    for (size_t k = 0; k < elements.size(); ++k) {
      const std::string suffix = "." + std::to_string(k + 1);
      for (const auto& member : members) {
        const dsl::TemplateNode* tn = p.find(member);
        gsn::GsnNode node = substitute_node(*tn, &elements[k], mult->expansion.over);
        node.id += suffix;
        nodes.push_back(std::move(node));
      }
      // Internal edges are cloned; edges crossing the subtree boundary are
      // re-pointed at this replica's copy of their inner endpoint.
      for (const auto& e : p.edges) {
        const bool src_in = members.count(e.source) > 0;
        const bool dst_in = members.count(e.target) > 0;
        if (!src_in && !dst_in) continue;
        gsn::GsnEdge copy = e;
        if (src_in) copy.source += suffix;
        if (dst_in) copy.target += suffix;
        edges.push_back(std::move(copy));
      }
    }
  }

  // Edges that touch no replicated subtree.
  for (const auto& e : p.edges)
    if (!member_of.count(e.source) && !member_of.count(e.target)) edges.push_back(e);

  for (auto& n : nodes) n.id = id_prefix + n.id;
  for (auto& e : edges) {
    e.source = id_prefix + e.source;
    e.target = id_prefix + e.target;
  }

  std::set<std::string> ids;
  for (const auto& n : nodes)
    if (!ids.insert(n.id).second)
      return Error{Errc::IdCollision, "instantiation produced duplicate id '" + n.id + "'"};

  return gsn::ArgumentGraph::from_parts(std::move(nodes), std::move(edges));
}

namespace detail {

/// Paper-style display aliases for the case-study numbering: the source
/// case names its four contexts C1.1, C1.2, C1.4 and C1.6.
inline std::string context_alias(size_t index) {
  static constexpr int numbering[] = {1, 2, 4, 6};
  if (index < 4) return "C1." + std::to_string(numbering[index]);
  return "C1." + std::to_string(index + 3);
}

inline const hara::SystemFunction* reject_function(const hara::HaraModel& m) {
  for (const auto& f : m.functions) {
    std::string lower = f.description;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower.find("reject") != std::string::npos) return &f;
  }
  return nullptr;
}

}  // namespace detail

/// Builds the top-level argument: root safety goal, contexts and
/// assumptions, an argument-over-system-functions strategy, one goal per
/// system function (the reject-capable function becomes the
/// reject-instructions goal) plus the accept-safe-instructions sibling.
/// All leaf goals are undeveloped until the patterns are grafted.
inline gsn::ArgumentGraph build_top_level(const BuildConfig& cfg, const hara::HaraModel& hara) {
  const std::string system = cfg.system_name.empty() ? hara.system_name : cfg.system_name;
  std::vector<gsn::GsnNode> nodes;
  std::vector<gsn::GsnEdge> edges;

  gsn::GsnNode root;
  root.id = "G.1";
  root.kind = gsn::NodeKind::Goal;
  root.statement = system + " is sufficiently safe to use";
  root.tags["alias"] = "G1.1";
  nodes.push_back(root);

  for (size_t i = 0; i < cfg.contexts.size(); ++i) {
    gsn::GsnNode ctx;
    ctx.id = "C." + std::to_string(i + 1);
    ctx.kind = gsn::NodeKind::Context;
    ctx.statement = cfg.contexts[i];
    ctx.tags["alias"] = detail::context_alias(i);
    nodes.push_back(ctx);
    edges.push_back({"G.1", ctx.id, gsn::EdgeKind::InContextOf});
  }
  for (size_t i = 0; i < cfg.assumptions.size(); ++i) {
    gsn::GsnNode a;
    a.id = "A." + std::to_string(i + 1);
    a.kind = gsn::NodeKind::Assumption;
    a.statement = cfg.assumptions[i];
    nodes.push_back(a);
    edges.push_back({"G.1", a.id, gsn::EdgeKind::InContextOf});
  }

  gsn::GsnNode strategy;
  strategy.id = "S.1";
  strategy.kind = gsn::NodeKind::Strategy;
  strategy.statement = "Argument over system functions";
  strategy.tags["alias"] = "S1.1";
  nodes.push_back(strategy);
  edges.push_back({"G.1", "S.1", gsn::EdgeKind::SupportedBy});

  const hara::SystemFunction* reject_sf = detail::reject_function(hara);
  int next = 2;
  for (const auto& sf : hara.functions) {
    gsn::GsnNode goal;
    goal.id = "G." + std::to_string(next++);
    goal.kind = gsn::NodeKind::Goal;
    goal.undeveloped = true;
    goal.tags["sf"] = sf.id;
    if (reject_sf && sf.id == reject_sf->id) {
      goal.statement = system + " is able to reject dangerous user instructions";
      goal.tags["role"] = "reject";
      goal.tags["alias"] = "G3.2";
    } else {
      goal.statement = sf.description;
    }
    nodes.push_back(goal);
    edges.push_back({"S.1", goal.id, gsn::EdgeKind::SupportedBy});
  }
  if (!reject_sf) {
    gsn::GsnNode goal;
    goal.id = "G." + std::to_string(next++);
    goal.kind = gsn::NodeKind::Goal;
    goal.undeveloped = true;
    goal.statement = system + " is able to reject dangerous user instructions";
    goal.tags["role"] = "reject";
    goal.tags["alias"] = "G3.2";
    nodes.push_back(goal);
    edges.push_back({"S.1", goal.id, gsn::EdgeKind::SupportedBy});
  }
  gsn::GsnNode accept;
  accept.id = "G." + std::to_string(next++);
  accept.kind = gsn::NodeKind::Goal;
  accept.undeveloped = true;
  accept.statement = system + " is able to accept safe user instructions";
  accept.tags["role"] = "accept";
  accept.tags["alias"] = "G3.3";
  nodes.push_back(accept);
  edges.push_back({"S.1", accept.id, gsn::EdgeKind::SupportedBy});

  return gsn::ArgumentGraph::from_parts(std::move(nodes), std::move(edges));
}

struct CoverageReport {
  enum class Verdict { Pass, Fail };

  // scenario id -> covered, in natural id order, per instruction branch
  std::vector<std::pair<std::string, bool>> reject_scenarios;
  std::vector<std::pair<std::string, bool>> accept_scenarios;
  std::vector<std::string> unbound_hotspots;          // node ids, sorted
  std::vector<std::string> unsupported_safety_goals;  // SG ids, natural order
  Verdict verdict = Verdict::Fail;

  bool pass() const { return verdict == Verdict::Pass; }

  friend bool operator==(const CoverageReport&, const CoverageReport&) = default;
};

namespace detail {

inline const gsn::GsnNode* find_role(const gsn::ArgumentGraph& g, std::string_view role) {
  for (const auto& n : g.nodes()) {
    auto it = n.tags.find("role");
    if (it != n.tags.end() && it->second == role) return &n;
  }
  return nullptr;
}

inline std::vector<std::string> split_ids(const std::string& joined) {
  std::vector<std::string> out;
  size_t begin = 0;
  while (begin <= joined.size()) {
    size_t comma = joined.find(',', begin);
    std::string part = joined.substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin);
    if (!part.empty()) out.push_back(part);
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

/// All values of `tag_key` on nodes reachable from `branch_root`, split on commas.
inline std::set<std::string> branch_tag_ids(const gsn::ArgumentGraph& g,
                                            const std::string& branch_root,
                                            const std::string& tag_key) {
  std::set<std::string> out;
  for (const auto& id : gsn::descendants(g, branch_root)) {
    const gsn::GsnNode* n = g.find(id);
    if (!n) continue;
    auto it = n->tags.find(tag_key);
    if (it == n->tags.end()) continue;
    for (auto& part : split_ids(it->second)) out.insert(std::move(part));
  }
  return out;
}

inline void sort_natural(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end(),
            [](const std::string& a, const std::string& b) {
              return raise::detail::natural_less(a, b);
            });
}

}  // namespace detail

/// Checks a case against the HARA model: per-branch scenario coverage (a
/// scenario counts as covered when a node under the branch carries an HE/SE
/// tag that references it), unbound hot spots, and safety goals of
/// top-priority hazards that appear in no node tag.
inline CoverageReport coverage_check(const gsn::ArgumentGraph& case_graph,
                                     const hara::HaraModel& hara, const BuildConfig& cfg) {
  CoverageReport report;

  const auto top = hara::top_priority_hazards(hara, cfg.priority_threshold);

  std::set<std::string> reject_required, accept_required;
  for (const auto& he : top) reject_required.insert(he.scenario_id);
  for (const auto& se : hara.safe_events) accept_required.insert(se.scenario_id);

  const gsn::GsnNode* reject_root = detail::find_role(case_graph, "reject");
  const gsn::GsnNode* accept_root = detail::find_role(case_graph, "accept");

  std::set<std::string> reject_covered, accept_covered;
  if (reject_root)
    for (const auto& he_id : detail::branch_tag_ids(case_graph, reject_root->id, "he"))
      if (const hara::HazardousEvent* he = hara.hazardous_event(he_id))
        reject_covered.insert(he->scenario_id);
  if (accept_root)
    for (const auto& se_id : detail::branch_tag_ids(case_graph, accept_root->id, "se"))
      if (const hara::SafeEvent* se = hara.safe_event(se_id))
        accept_covered.insert(se->scenario_id);

  bool all_covered = true;
  auto fill = [&](const std::set<std::string>& required, const std::set<std::string>& covered,
                  std::vector<std::pair<std::string, bool>>& out) {
    std::vector<std::string> ids(required.begin(), required.end());
    detail::sort_natural(ids);
    for (auto& id : ids) {
      bool hit = covered.count(id) > 0;
      all_covered = all_covered && hit;
      out.push_back({std::move(id), hit});
    }
  };
  fill(reject_required, reject_covered, report.reject_scenarios);
  fill(accept_required, accept_covered, report.accept_scenarios);

  for (const auto& n : case_graph.nodes())
    if (n.uninstantiated) report.unbound_hotspots.push_back(n.id);
  std::sort(report.unbound_hotspots.begin(), report.unbound_hotspots.end());
  report.unbound_hotspots.erase(
      std::unique(report.unbound_hotspots.begin(), report.unbound_hotspots.end()),
      report.unbound_hotspots.end());

  std::set<std::string> tagged_goals;
  for (const auto& n : case_graph.nodes()) {
    auto it = n.tags.find("sg");
    if (it == n.tags.end()) continue;
    for (auto& part : detail::split_ids(it->second)) tagged_goals.insert(std::move(part));
  }
  std::set<std::string> missing;
  for (const auto& he : top)
    if (!he.safety_goal_id.empty() && !tagged_goals.count(he.safety_goal_id))
      missing.insert(he.safety_goal_id);
  report.unsupported_safety_goals.assign(missing.begin(), missing.end());
  detail::sort_natural(report.unsupported_safety_goals);

  const bool pass = all_covered && report.unbound_hotspots.empty() &&
                    report.unsupported_safety_goals.empty();
  report.verdict = pass ? CoverageReport::Verdict::Pass : CoverageReport::Verdict::Fail;
  return report;
}

struct BuildOutput {
  gsn::ArgumentGraph safety_case;
  CoverageReport coverage;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// The full construction algorithm: top-level argument, RI instantiation
/// over the scenarios of top-priority hazardous events, AAI instantiation
/// over the safe events, grafted under the reject/accept goals, plus the
/// coverage report for the result.
inline Result<BuildOutput> build_safety_case(const BuildConfig& cfg, const hara::HaraModel& hara,
                                             const dsl::PatternLibrary& lib) {
  const dsl::Pattern* ri = lib.find(cfg.patterns.reject);
  if (!ri)
    return Error{Errc::PatternNotFound, "pattern '" + cfg.patterns.reject + "' is not in the library"};
  const dsl::Pattern* aai = lib.find(cfg.patterns.accept);
  if (!aai)
    return Error{Errc::PatternNotFound, "pattern '" + cfg.patterns.accept + "' is not in the library"};

  const std::string system = cfg.system_name.empty() ? hara.system_name : cfg.system_name;
  gsn::ArgumentGraph top = build_top_level(cfg, hara);

  // Reject branch: one element per scenario referenced by a top-priority
  // hazardous event, ascending scenario id.
  const auto top_events = hara::top_priority_hazards(hara, cfg.priority_threshold);
  std::vector<std::string> scenario_ids;
  for (const auto& he : top_events)
    if (std::find(scenario_ids.begin(), scenario_ids.end(), he.scenario_id) == scenario_ids.end())
      scenario_ids.push_back(he.scenario_id);
  detail::sort_natural(scenario_ids);

  std::vector<Record> reject_elements;
  for (const auto& os_id : scenario_ids) {
    const hara::OperationalScenario* os = hara.scenario(os_id);
    std::vector<std::string> he_ids, sg_ids, sg_statements;
    for (const auto& he : top_events) {
      if (he.scenario_id != os_id) continue;
      he_ids.push_back(he.id);
      if (!he.safety_goal_id.empty() &&
          std::find(sg_ids.begin(), sg_ids.end(), he.safety_goal_id) == sg_ids.end()) {
        sg_ids.push_back(he.safety_goal_id);
        if (const hara::SafetyGoal* sg = hara.safety_goal(he.safety_goal_id))
          sg_statements.push_back(sg->statement);
      }
    }
    detail::sort_natural(he_ids);
    detail::sort_natural(sg_ids);
    Record r;
    r["id"] = os_id;
    r["description"] = os ? os->description : os_id;
    r["he"] = detail::join(he_ids, ",");
    r["sg"] = detail::join(sg_ids, ",");
    r["safety_goal"] = detail::join(sg_statements, "; ");
    r["evidence"] = "Test results showing the dangerous instruction is rejected in " + os_id +
                    " (" + detail::join(he_ids, ", ") + ")";
    reject_elements.push_back(std::move(r));
  }

  BindingSet reject_bindings;
  reject_bindings.scalars["system"] = system;
  reject_bindings.collections["scenario"] = std::move(reject_elements);
  auto reject_fragment = instantiate_pattern(*ri, reject_bindings, "");
  if (!reject_fragment)
    return Error{reject_fragment.error().code,
                 "reject branch: " + reject_fragment.error().message};

  // Accept branch: one element per safe event, ascending event id.
  std::vector<Record> accept_elements;
  for (const auto& se : hara.safe_events) {
    const hara::OperationalScenario* os = hara.scenario(se.scenario_id);
    Record r;
    r["id"] = se.id;
    r["os"] = se.scenario_id;
    r["description"] = os ? os->description : se.scenario_id;
    r["instruction"] = se.instruction;
    r["outcome"] = se.expected_outcome;
    r["evidence"] = "Test results confirming the expected outcome of " + se.id + " in " +
                    se.scenario_id;
    accept_elements.push_back(std::move(r));
  }

  BindingSet accept_bindings;
  accept_bindings.scalars["system"] = system;
  accept_bindings.scalars["outcome"] = "the expected outcome in each operational scenario";
  accept_bindings.collections["scenario"] = std::move(accept_elements);
  auto accept_fragment = instantiate_pattern(*aai, accept_bindings, "");
  if (!accept_fragment)
    return Error{accept_fragment.error().code,
                 "accept branch: " + accept_fragment.error().message};

  const gsn::GsnNode* reject_goal = detail::find_role(top, "reject");
  const gsn::GsnNode* accept_goal = detail::find_role(top, "accept");

  auto grafted = gsn::graft_subtree(top, reject_goal->id, reject_fragment.value(),
                                    cfg.prefix("reject"));
  if (!grafted) return grafted.error();
  auto full = gsn::graft_subtree(grafted.value(), accept_goal->id, accept_fragment.value(),
                                 cfg.prefix("accept"));
  if (!full) return full.error();

  gsn::ArgumentGraph case_graph = std::move(full).value();
  for (const char* role : {"reject", "accept"}) {
    gsn::GsnNode node = *detail::find_role(case_graph, role);
    node.undeveloped = false;  // both goals are now supported by a pattern
    case_graph = std::move(gsn::replace_node(case_graph, node)).value();
  }

  BuildOutput out{std::move(case_graph), {}};
  out.coverage = coverage_check(out.safety_case, hara, cfg);
  return out;
}

}  // namespace raise::build
