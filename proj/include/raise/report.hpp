#pragma once

#include <map>
#include <string>
#include <vector>

#include "raise/builder.hpp"
#include "raise/gsn.hpp"
#include "raise/hara.hpp"

namespace raise::emit {

/// Human-readable Markdown build report: verdict, per-branch scenario
/// coverage, safety-goal traceability, and the case's validator findings.
/// Output is fully deterministic.
inline std::string emit_report(const gsn::ArgumentGraph& case_graph, const hara::HaraModel& hara,
                               const build::CoverageReport& coverage) {
  std::string out;
  out += "# Safety case report: " + hara.system_name + "\n\n";
  out += std::string("Verdict: **") + (coverage.pass() ? "PASS" : "FAIL") + "**\n\n";

  out += "## Scenario coverage\n\n";
  out += "| Scenario | Branch | Status |\n";
  out += "| --- | --- | --- |\n";
  {
    // Scenario-major rows, reject before accept.
    std::vector<std::string> ids;
    std::map<std::string, bool> reject, accept;
    for (const auto& [id, covered] : coverage.reject_scenarios) {
      reject[id] = covered;
      ids.push_back(id);
    }
    for (const auto& [id, covered] : coverage.accept_scenarios) {
      accept[id] = covered;
      if (!reject.count(id)) ids.push_back(id);
    }
    build::detail::sort_natural(ids);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (const auto& id : ids) {
      if (reject.count(id))
        out += "| " + id + " | reject | " + (reject[id] ? "covered" : "MISSING") + " |\n";
      if (accept.count(id))
        out += "| " + id + " | accept | " + (accept[id] ? "covered" : "MISSING") + " |\n";
    }
  }
  out += "\n";

  out += "## Safety goal traceability\n\n";
  out += "| Safety goal | Node |\n";
  out += "| --- | --- |\n";
  for (const auto& sg : hara.safety_goals) {
    std::string node_id = "MISSING";
    for (const auto& n : case_graph.nodes()) {
      auto it = n.tags.find("sg");
      if (it == n.tags.end()) continue;
      auto parts = build::detail::split_ids(it->second);
      if (std::find(parts.begin(), parts.end(), sg.id) != parts.end()) {
        node_id = n.id;
        break;  // nodes are id-sorted, so this is the smallest match
      }
    }
    out += "| " + sg.id + " | " + node_id + " |\n";
  }
  out += "\n";

  out += "## Diagnostics\n\n";
  auto findings = gsn::validate_graph(case_graph, gsn::GraphMode::FullCase);
  if (findings.empty()) {
    out += "- none\n";
  } else {
    for (const auto& d : findings) out += "- " + format_diagnostic(d) + "\n";
  }
  return out;
}

}  // namespace raise::emit
