#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "raise/diag.hpp"

namespace raise::gsn {

enum class NodeKind { Goal, Strategy, Solution, Context, Assumption, Justification };
enum class EdgeKind { SupportedBy, InContextOf };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Goal: return "Goal";
    case NodeKind::Strategy: return "Strategy";
    case NodeKind::Solution: return "Solution";
    case NodeKind::Context: return "Context";
    case NodeKind::Assumption: return "Assumption";
    case NodeKind::Justification: return "Justification";
  }
  return "Goal";
}

inline std::optional<NodeKind> node_kind_from(std::string_view s) {
  if (s == "Goal") return NodeKind::Goal;
  if (s == "Strategy") return NodeKind::Strategy;
  if (s == "Solution") return NodeKind::Solution;
  if (s == "Context") return NodeKind::Context;
  if (s == "Assumption") return NodeKind::Assumption;
  if (s == "Justification") return NodeKind::Justification;
  return std::nullopt;
}

inline const char* to_string(EdgeKind k) {
  return k == EdgeKind::SupportedBy ? "SupportedBy" : "InContextOf";
}

inline std::optional<EdgeKind> edge_kind_from(std::string_view s) {
  if (s == "SupportedBy") return EdgeKind::SupportedBy;
  if (s == "InContextOf") return EdgeKind::InContextOf;
  return std::nullopt;
}

/// Goal, Strategy and Solution carry the support structure; the other three
/// kinds only annotate it.
inline bool is_support_kind(NodeKind k) {
  return k == NodeKind::Goal || k == NodeKind::Strategy || k == NodeKind::Solution;
}

inline bool is_context_kind(NodeKind k) {
  return k == NodeKind::Context || k == NodeKind::Assumption || k == NodeKind::Justification;
}

/// Node ids match [A-Za-z][A-Za-z0-9_.-]*.
inline bool valid_node_id(std::string_view id) {
  if (id.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
  auto tail = [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
  };
  if (!alpha(id[0])) return false;
  return std::all_of(id.begin() + 1, id.end(), tail);
}

struct GsnNode {
  std::string id;
  NodeKind kind = NodeKind::Goal;
  std::string statement;
  bool undeveloped = false;
  bool uninstantiated = false;
  std::map<std::string, std::string> tags;

  friend bool operator==(const GsnNode&, const GsnNode&) = default;
};

struct GsnEdge {
  std::string source;
  std::string target;
  EdgeKind kind = EdgeKind::SupportedBy;

  friend auto operator<=>(const GsnEdge&, const GsnEdge&) = default;
};

/// Immutable-by-convention GSN graph. Nodes are kept sorted by id and edges
/// by (source, target, kind), so equality and serialization are canonical
/// regardless of insertion order. Ill-formed graphs are representable (via
/// from_parts) so that validate_graph can judge them; the editing operations
/// below refuse to create them.
class ArgumentGraph {
 public:
  ArgumentGraph() = default;

  /// Builds a graph from raw parts without any checking.
  static ArgumentGraph from_parts(std::vector<GsnNode> nodes, std::vector<GsnEdge> edges) {
    ArgumentGraph g;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    g.canonicalize();
    return g;
  }

  const std::vector<GsnNode>& nodes() const { return nodes_; }
  const std::vector<GsnEdge>& edges() const { return edges_; }

  bool empty() const { return nodes_.empty(); }

  const GsnNode* find(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const GsnNode& n, std::string_view v) { return n.id < v; });
    if (it != nodes_.end() && it->id == id) return &*it;
    return nullptr;
  }

  bool has_edge(const GsnEdge& e) const {
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  std::vector<const GsnEdge*> outgoing(std::string_view id) const {
    std::vector<const GsnEdge*> out;
    for (const auto& e : edges_)
      if (e.source == id) out.push_back(&e);
    return out;
  }

  friend bool operator==(const ArgumentGraph&, const ArgumentGraph&) = default;

 private:
  void canonicalize() {
    std::stable_sort(nodes_.begin(), nodes_.end(),
                     [](const GsnNode& a, const GsnNode& b) { return a.id < b.id; });
    std::stable_sort(edges_.begin(), edges_.end());
  }

  std::vector<GsnNode> nodes_;
  std::vector<GsnEdge> edges_;
};

enum class GraphMode { FullCase, Fragment };

namespace detail {

/// True if `to` is reachable from `from` along SupportedBy edges.
inline bool supported_by_reaches(const ArgumentGraph& g, std::string_view from,
                                 std::string_view to) {
  std::vector<std::string_view> stack{from};
  std::set<std::string_view> seen;
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (cur == to) return true;
    if (!seen.insert(cur).second) continue;
    for (const auto& e : g.edges())
      if (e.kind == EdgeKind::SupportedBy && e.source == cur) stack.push_back(e.target);
  }
  return false;
}

}  // namespace detail

/// Support-kind nodes with no incoming SupportedBy edge, in id order.
inline std::vector<std::string> roots(const ArgumentGraph& g) {
  std::set<std::string_view> targets;
  for (const auto& e : g.edges())
    if (e.kind == EdgeKind::SupportedBy && g.find(e.target)) targets.insert(e.target);
  std::vector<std::string> out;
  for (const auto& n : g.nodes())
    if (is_support_kind(n.kind) && !targets.count(n.id)) out.push_back(n.id);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool edge_kinds_compatible(NodeKind source, NodeKind target, EdgeKind kind) {
  if (source != NodeKind::Goal && source != NodeKind::Strategy) return false;
  if (kind == EdgeKind::SupportedBy) return is_support_kind(target);
  return is_context_kind(target);
}

/// Checks every ArgumentGraph invariant plus the case-level rules and
/// returns the findings sorted by (code, locus). Rule codes:
///   GSN001 invalid node id            GSN008 undeveloped Solution
///   GSN002 empty statement            GSN009 SupportedBy cycle
///   GSN003 duplicate node id          GSN010 unsupported Goal
///   GSN004 unknown edge endpoint      GSN011 root count != 1
///   GSN005 self-loop edge             GSN012 root is not a Goal (full case)
///   GSN006 duplicate edge             GSN020 undeveloped Goal (warning)
///   GSN007 incompatible edge kinds    GSN021 uninstantiated node (warning)
///                                     GSN022 root Goal has no context (warning, full case)
/// Fragment mode (pattern templates and instantiations) skips GSN012/GSN022.
inline std::vector<Diagnostic> validate_graph(const ArgumentGraph& g,
                                              GraphMode mode = GraphMode::FullCase) {
  std::vector<Diagnostic> out;

  for (size_t i = 0; i < g.nodes().size(); ++i) {
    const GsnNode& n = g.nodes()[i];
    if (!valid_node_id(n.id))
      out.push_back(err("GSN001", "node id '" + n.id + "' is not a valid identifier", n.id));
    if (raise::detail::trim(n.statement).empty())
      out.push_back(err("GSN002", "node statement is empty", n.id));
    if (i > 0 && g.nodes()[i - 1].id == n.id)
      out.push_back(err("GSN003", "duplicate node id '" + n.id + "'", n.id));
    if (n.kind == NodeKind::Solution && n.undeveloped)
      out.push_back(err("GSN008", "Solution node is marked undeveloped", n.id));
    if (n.kind == NodeKind::Goal && n.undeveloped)
      out.push_back(warn("GSN020", "goal is undeveloped", n.id));
    if (n.uninstantiated)
      out.push_back(warn("GSN021", "node is uninstantiated (unbound hot spot)", n.id));
  }

  for (size_t i = 0; i < g.edges().size(); ++i) {
    const GsnEdge& e = g.edges()[i];
    const std::string locus = e.source + "->" + e.target;
    const GsnNode* src = g.find(e.source);
    const GsnNode* dst = g.find(e.target);
    if (!src)
      out.push_back(err("GSN004", "edge source '" + e.source + "' does not exist", locus));
    if (!dst)
      out.push_back(err("GSN004", "edge target '" + e.target + "' does not exist", locus));
    if (e.source == e.target)
      out.push_back(err("GSN005", "edge connects a node to itself", locus));
    if (i > 0 && g.edges()[i - 1] == e)
      out.push_back(err("GSN006", "duplicate edge", locus));
    if (src && dst && e.source != e.target && !edge_kinds_compatible(src->kind, dst->kind, e.kind))
      out.push_back(err("GSN007",
                        std::string(to_string(e.kind)) + " edge from " + to_string(src->kind) +
                            " to " + to_string(dst->kind) + " is not allowed",
                        locus));
  }

  // SupportedBy cycles, one finding per strongly connected component of
  // size > 1 (self-loops are already covered by GSN005).
  {
    std::vector<std::string> ids;
    for (const auto& n : g.nodes()) ids.push_back(n.id);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::map<std::string_view, std::vector<std::string_view>> adj;
    for (const auto& e : g.edges())
      if (e.kind == EdgeKind::SupportedBy && e.source != e.target && g.find(e.source) &&
          g.find(e.target))
        adj[e.source].push_back(e.target);

    // Iterative Tarjan.
    std::map<std::string_view, int> index, low;
    std::set<std::string_view> on_stack;
    std::vector<std::string_view> stack;
    int counter = 0;
    struct Frame {
      std::string_view v;
      size_t next = 0;
    };
    for (const auto& start : ids) {
      if (index.count(start)) continue;
      std::vector<Frame> frames{{start}};
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next == 0) {
          index[f.v] = low[f.v] = counter++;
          stack.push_back(f.v);
          on_stack.insert(f.v);
        }
        const auto& nbrs = adj[f.v];
        if (f.next < nbrs.size()) {
          auto w = nbrs[f.next++];
          if (!index.count(w)) {
            frames.push_back({w});
          } else if (on_stack.count(w)) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
        } else {
          if (low[f.v] == index[f.v]) {
            std::vector<std::string_view> scc;
            while (true) {
              auto w = stack.back();
              stack.pop_back();
              on_stack.erase(w);
              scc.push_back(w);
              if (w == f.v) break;
            }
            if (scc.size() > 1) {
              std::sort(scc.begin(), scc.end());
              std::string members;
              for (const auto& m : scc) {
                if (!members.empty()) members += ", ";
                members += m;
              }
              out.push_back(err("GSN009", "SupportedBy edges form a cycle through " + members,
                                std::string(scc.front())));
            }
          }
          auto finished = f.v;
          frames.pop_back();
          if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
        }
      }
    }
  }

  for (const auto& n : g.nodes()) {
    if (n.kind != NodeKind::Goal || n.undeveloped) continue;
    bool supported = std::any_of(g.edges().begin(), g.edges().end(), [&](const GsnEdge& e) {
      return e.kind == EdgeKind::SupportedBy && e.source == n.id;
    });
    if (!supported)
      out.push_back(err("GSN010", "goal is neither supported nor marked undeveloped", n.id));
  }

  const auto root_ids = roots(g);
  if (root_ids.size() != 1) {
    std::string joined;
    for (const auto& r : root_ids) {
      if (!joined.empty()) joined += ", ";
      joined += r;
    }
    out.push_back(err("GSN011",
                      "expected exactly one root, found " + std::to_string(root_ids.size()) +
                          (joined.empty() ? "" : " (" + joined + ")"),
                      joined));
  } else if (mode == GraphMode::FullCase) {
    const GsnNode* root = g.find(root_ids.front());
    if (root && root->kind != NodeKind::Goal) {
      out.push_back(err("GSN012",
                        "root node is a " + std::string(to_string(root->kind)) + ", expected Goal",
                        root->id));
    } else if (root) {
      bool has_ctx = std::any_of(g.edges().begin(), g.edges().end(), [&](const GsnEdge& e) {
        return e.kind == EdgeKind::InContextOf && e.source == root->id;
      });
      if (!has_ctx)
        out.push_back(warn("GSN022", "root goal has no context or assumption", root->id));
    }
  }

  sort_diagnostics(out);
  return out;
}

/// Adds a node; refuses ids, statements or flags that could never validate.
inline Result<ArgumentGraph> add_node(const ArgumentGraph& g, GsnNode node) {
  if (!valid_node_id(node.id))
    return Error{Errc::InvalidNode, "node id '" + node.id + "' is not a valid identifier"};
  if (raise::detail::trim(node.statement).empty())
    return Error{Errc::InvalidNode, "node '" + node.id + "' has an empty statement"};
  if (node.kind == NodeKind::Solution && node.undeveloped)
    return Error{Errc::InvalidNode, "Solution '" + node.id + "' cannot be undeveloped"};
  if (g.find(node.id))
    return Error{Errc::DuplicateNode, "node id '" + node.id + "' already exists"};
  auto nodes = g.nodes();
  nodes.push_back(std::move(node));
  return ArgumentGraph::from_parts(std::move(nodes), g.edges());
}

/// Adds an edge, enforcing endpoint existence, the kind-compatibility
/// matrix, uniqueness and SupportedBy acyclicity. Value semantics: the
/// input graph is unchanged.
inline Result<ArgumentGraph> add_edge(const ArgumentGraph& g, GsnEdge edge) {
  const GsnNode* src = g.find(edge.source);
  const GsnNode* dst = g.find(edge.target);
  if (!src) return Error{Errc::UnknownEndpoint, "edge source '" + edge.source + "' does not exist"};
  if (!dst) return Error{Errc::UnknownEndpoint, "edge target '" + edge.target + "' does not exist"};
  if (edge.source == edge.target)
    return Error{Errc::CycleIntroduced, "edge from '" + edge.source + "' to itself"};
  if (g.has_edge(edge)) return Error{Errc::DuplicateEdge, "edge already present"};
  if (!edge_kinds_compatible(src->kind, dst->kind, edge.kind))
    return Error{Errc::KindIncompatible, std::string(to_string(edge.kind)) + " edge from " +
                                             to_string(src->kind) + " to " + to_string(dst->kind) +
                                             " is not allowed"};
  if (edge.kind == EdgeKind::SupportedBy &&
      detail::supported_by_reaches(g, edge.target, edge.source))
    return Error{Errc::CycleIntroduced,
                 "adding " + edge.source + "->" + edge.target + " would create a cycle"};
  auto edges = g.edges();
  edges.push_back(std::move(edge));
  return ArgumentGraph::from_parts(g.nodes(), std::move(edges));
}

inline Result<ArgumentGraph> remove_edge(const ArgumentGraph& g, const GsnEdge& edge) {
  if (!g.has_edge(edge))
    return Error{Errc::UnknownEdge, "edge " + edge.source + "->" + edge.target + " not present"};
  auto edges = g.edges();
  edges.erase(std::find(edges.begin(), edges.end(), edge));
  return ArgumentGraph::from_parts(g.nodes(), std::move(edges));
}

/// Replaces one node's payload, keyed by `node.id`.
inline Result<ArgumentGraph> replace_node(const ArgumentGraph& g, const GsnNode& node) {
  if (!g.find(node.id))
    return Error{Errc::UnknownEndpoint, "node '" + node.id + "' does not exist"};
  auto nodes = g.nodes();
  for (auto& n : nodes)
    if (n.id == node.id) n = node;
  return ArgumentGraph::from_parts(std::move(nodes), g.edges());
}

/// Grafts `subtree` (one root, ids renamed with `prefix`) under the Goal or
/// Strategy `at`, connected by a new SupportedBy edge.
inline Result<ArgumentGraph> graft_subtree(const ArgumentGraph& g, std::string_view at,
                                           const ArgumentGraph& subtree, std::string_view prefix) {
  const GsnNode* attach = g.find(at);
  if (!attach)
    return Error{Errc::UnknownAttachPoint, "attach point '" + std::string(at) + "' does not exist"};
  if (attach->kind != NodeKind::Goal && attach->kind != NodeKind::Strategy)
    return Error{Errc::UnknownAttachPoint, "attach point '" + std::string(at) + "' is a " +
                                               to_string(attach->kind) +
                                               "; only Goal or Strategy accept subtrees"};
  const auto subtree_roots = roots(subtree);
  if (subtree_roots.size() != 1)
    return Error{Errc::MultiRootSubtree, "subtree has " + std::to_string(subtree_roots.size()) +
                                             " roots, expected exactly one"};
  for (const auto& n : subtree.nodes()) {
    std::string renamed = std::string(prefix) + n.id;
    if (!valid_node_id(renamed))
      return Error{Errc::BadPrefix, "prefixed id '" + renamed + "' is not a valid identifier"};
    if (g.find(renamed))
      return Error{Errc::IdCollision, "id '" + renamed + "' already exists in the target graph"};
  }

  auto nodes = g.nodes();
  for (GsnNode n : subtree.nodes()) {
    n.id = std::string(prefix) + n.id;
    nodes.push_back(std::move(n));
  }
  auto edges = g.edges();
  for (GsnEdge e : subtree.edges()) {
    e.source = std::string(prefix) + e.source;
    e.target = std::string(prefix) + e.target;
    edges.push_back(std::move(e));
  }
  edges.push_back(GsnEdge{std::string(at), std::string(prefix) + subtree_roots.front(),
                          EdgeKind::SupportedBy});
  return ArgumentGraph::from_parts(std::move(nodes), std::move(edges));
}

/// Node ids reachable from `start` along edges of any kind, `start` included.
inline std::set<std::string> descendants(const ArgumentGraph& g, std::string_view start) {
  std::set<std::string> seen;
  std::vector<std::string> stack{std::string(start)};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& e : g.edges())
      if (e.source == cur) stack.push_back(e.target);
  }
  return seen;
}

}  // namespace raise::gsn
