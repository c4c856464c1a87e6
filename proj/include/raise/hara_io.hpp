#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "raise/csv.hpp"
#include "raise/hara.hpp"

namespace raise::hara {

namespace io_detail {

inline bool id_matches(std::string_view id, std::string_view prefix) {
  if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix) return false;
  for (char c : id.substr(prefix.size()))
    if (c < '0' || c > '9') return false;
  return true;
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParseResult<csv::Table> load_table(const std::filesystem::path& dir, const std::string& name,
                                          const std::vector<std::string>& expected_header) {
  auto text = read_file(dir / name);
  if (!text) return std::vector<Diagnostic>{err("HAR001", "required file is missing", name)};
  auto parsed = csv::parse(*text, name);
  if (!parsed) return parsed.diagnostics();
  if (parsed.value().header != expected_header) {
    std::string want;
    for (size_t i = 0; i < expected_header.size(); ++i)
      want += (i ? "," : "") + expected_header[i];
    return std::vector<Diagnostic>{err("HAR002", "header must be exactly '" + want + "'",
                                       name + ":1")};
  }
  return parsed;
}

}  // namespace io_detail

/// Loads the six-file HARA directory. Ratings are recomputed from the risk
/// table (the directory's asil_table.csv when present, otherwise the
/// standard one); a non-empty input rating column is cross-checked and any
/// mismatch is reported (HAR006). Warnings are appended to `*warnings` when
/// given; errors abort the parse and come back as the diagnostic list.
inline ParseResult<HaraModel> parse_hara(const std::filesystem::path& dir,
                                         std::vector<Diagnostic>* warnings = nullptr) {
  namespace d = io_detail;
  std::vector<Diagnostic> errs;
  std::vector<Diagnostic> warns;
  HaraModel m;

  if (!std::filesystem::is_directory(dir)) {
    errs.push_back(err("HAR000", "not a directory", dir.string()));
    return errs;
  }

  RiskTable table = RiskTable::standard();
  if (auto text = d::read_file(dir / "asil_table.csv")) {
    auto loaded = RiskTable::load(*text);
    if (!loaded) {
      errs.insert(errs.end(), loaded.diagnostics().begin(), loaded.diagnostics().end());
    } else {
      table = loaded.value();
      auto mono = table.monotonicity_findings();
      warns.insert(warns.end(), mono.begin(), mono.end());
    }
  }

  // meta.csv
  if (auto t = d::load_table(dir, "meta.csv", {"key", "value"})) {
    bool saw_name = false, saw_def = false;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "meta.csv:" + std::to_string(i + 2);
      if (row.size() != 2) {
        errs.push_back(err("HAR003", "expected 2 fields", locus));
        continue;
      }
      if (row[0] == "system_name") {
        m.system_name = row[1];
        saw_name = true;
      } else if (row[0] == "definition") {
        m.definition = row[1];
        saw_def = true;
      } else if (row[0] == "assumption") {
        m.assumptions.push_back(row[1]);
      } else {
        warns.push_back(warn("HAR013", "unknown meta key '" + row[0] + "'", locus));
      }
    }
    if (!saw_name) errs.push_back(err("HAR009", "meta.csv lacks a system_name row", "meta.csv"));
    if (!saw_def) errs.push_back(err("HAR009", "meta.csv lacks a definition row", "meta.csv"));
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  auto check_unique = [&errs](const std::string& file, size_t row_no, const std::string& id,
                              std::vector<std::string>& seen) {
    if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
      errs.push_back(err("HAR004", "duplicate id '" + id + "'",
                         file + ":" + std::to_string(row_no)));
      return false;
    }
    seen.push_back(id);
    return true;
  };
  auto check_id = [&errs](const std::string& file, size_t row_no, const std::string& id,
                          std::string_view prefix) {
    if (!d::id_matches(id, prefix)) {
      errs.push_back(err("HAR007", "id '" + id + "' does not match " + std::string(prefix) +
                                       "<digits>",
                         file + ":" + std::to_string(row_no)));
      return false;
    }
    return true;
  };

  // system_functions.csv
  if (auto t = d::load_table(dir, "system_functions.csv", {"id", "description"})) {
    std::vector<std::string> seen;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "system_functions.csv:" + std::to_string(i + 2);
      if (row.size() != 2) {
        errs.push_back(err("HAR003", "expected 2 fields", locus));
        continue;
      }
      if (!check_id("system_functions.csv", i + 2, row[0], "SF")) continue;
      if (!check_unique("system_functions.csv", i + 2, row[0], seen)) continue;
      if (raise::detail::trim(row[1]).empty()) {
        errs.push_back(err("HAR010", "description is empty", locus));
        continue;
      }
      m.functions.push_back({row[0], row[1]});
    }
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  // operational_scenarios.csv
  if (auto t = d::load_table(dir, "operational_scenarios.csv", {"id", "description"})) {
    std::vector<std::string> seen;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "operational_scenarios.csv:" + std::to_string(i + 2);
      if (row.size() != 2) {
        errs.push_back(err("HAR003", "expected 2 fields", locus));
        continue;
      }
      if (!check_id("operational_scenarios.csv", i + 2, row[0], "OS")) continue;
      if (!check_unique("operational_scenarios.csv", i + 2, row[0], seen)) continue;
      if (raise::detail::trim(row[1]).empty()) {
        errs.push_back(err("HAR010", "description is empty", locus));
        continue;
      }
      m.scenarios.push_back({row[0], row[1]});
    }
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  // malfunctions.csv
  if (auto t = d::load_table(dir, "malfunctions.csv", {"id", "function_id", "description"})) {
    std::vector<std::string> seen;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "malfunctions.csv:" + std::to_string(i + 2);
      if (row.size() != 3) {
        errs.push_back(err("HAR003", "expected 3 fields", locus));
        continue;
      }
      if (!check_id("malfunctions.csv", i + 2, row[0], "MF")) continue;
      if (!check_unique("malfunctions.csv", i + 2, row[0], seen)) continue;
      if (!m.function(row[1])) {
        errs.push_back(err("HAR005", "unknown function_id '" + row[1] + "'", locus));
        continue;
      }
      m.malfunctions.push_back({row[0], row[1], row[2]});
    }
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  // hazardous_events.csv
  std::map<std::string, std::string> goal_statements;
  if (auto t = d::load_table(dir, "hazardous_events.csv",
                             {"id", "malfunction_id", "scenario_id", "effect", "severity",
                              "exposure", "controllability", "rating", "safety_goal_id",
                              "safety_goal_statement"})) {
    std::vector<std::string> seen;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "hazardous_events.csv:" + std::to_string(i + 2);
      if (row.size() != 10) {
        errs.push_back(err("HAR003", "expected 10 fields", locus));
        continue;
      }
      if (!check_id("hazardous_events.csv", i + 2, row[0], "HE")) continue;
      if (!check_unique("hazardous_events.csv", i + 2, row[0], seen)) continue;
      HazardousEvent he;
      he.id = row[0];
      he.malfunction_id = row[1];
      he.scenario_id = row[2];
      he.effect = row[3];
      if (!m.malfunction(he.malfunction_id))
        errs.push_back(err("HAR005", "unknown malfunction_id '" + he.malfunction_id + "'", locus));
      if (!m.scenario(he.scenario_id))
        errs.push_back(err("HAR005", "unknown scenario_id '" + he.scenario_id + "'", locus));
      auto s = severity_from(row[4]);
      auto e = exposure_from(row[5]);
      auto c = controllability_from(row[6]);
      if (!s || !e || !c) {
        errs.push_back(err("HAR008", "severity/exposure/controllability must be S0-S3/E0-E4/C0-C3",
                           locus));
        continue;
      }
      he.risk = {*s, *e, *c, table.rating(*s, *e, *c)};
      if (!row[7].empty()) {
        auto declared = rating_from(row[7]);
        if (!declared) {
          errs.push_back(err("HAR008", "unknown rating '" + row[7] + "'", locus));
        } else if (*declared != he.risk.rating) {
          errs.push_back(err("HAR006", "declared rating " + row[7] + " does not match computed " +
                                           to_string(he.risk.rating),
                             locus));
        }
      }
      if (!row[8].empty()) {
        if (!check_id("hazardous_events.csv", i + 2, row[8], "SG")) continue;
        he.safety_goal_id = row[8];
        if (raise::detail::trim(row[9]).empty()) {
          errs.push_back(err("HAR014", "safety goal '" + row[8] + "' has no statement", locus));
        } else {
          auto it = goal_statements.find(row[8]);
          if (it == goal_statements.end()) {
            goal_statements[row[8]] = row[9];
          } else if (it->second != row[9]) {
            errs.push_back(err("HAR011", "safety goal '" + row[8] +
                                             "' has conflicting statements across rows",
                               locus));
          }
        }
      } else if (!raise::detail::trim(row[9]).empty()) {
        errs.push_back(err("HAR014", "safety_goal_statement given without safety_goal_id", locus));
      }
      m.hazardous_events.push_back(std::move(he));
    }
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  // safe_events.csv; the exact-header rule rejects risk columns here.
  if (auto t = d::load_table(dir, "safe_events.csv",
                             {"id", "instruction", "scenario_id", "expected_outcome"})) {
    std::vector<std::string> seen;
    for (size_t i = 0; i < t.value().rows.size(); ++i) {
      const auto& row = t.value().rows[i];
      std::string locus = "safe_events.csv:" + std::to_string(i + 2);
      if (row.size() != 4) {
        errs.push_back(err("HAR003", "expected 4 fields", locus));
        continue;
      }
      if (!check_id("safe_events.csv", i + 2, row[0], "SE")) continue;
      if (!check_unique("safe_events.csv", i + 2, row[0], seen)) continue;
      if (!m.scenario(row[2]))
        errs.push_back(err("HAR005", "unknown scenario_id '" + row[2] + "'", locus));
      m.safe_events.push_back({row[0], row[1], row[2], row[3]});
    }
  } else {
    errs.insert(errs.end(), t.diagnostics().begin(), t.diagnostics().end());
  }

  // Derive safety goals; priority is the worst linked hazardous event.
  for (const auto& [id, statement] : goal_statements) {
    SafetyGoal sg{id, statement, Rating::QM};
    for (const auto& he : m.hazardous_events)
      if (he.safety_goal_id == id && he.risk.rating > sg.priority) sg.priority = he.risk.rating;
    m.safety_goals.push_back(std::move(sg));
  }

  auto by_id = [](const auto& a, const auto& b) {
    return raise::detail::natural_less(a.id, b.id);
  };
  std::sort(m.functions.begin(), m.functions.end(), by_id);
  std::sort(m.malfunctions.begin(), m.malfunctions.end(), by_id);
  std::sort(m.scenarios.begin(), m.scenarios.end(), by_id);
  std::sort(m.hazardous_events.begin(), m.hazardous_events.end(), by_id);
  std::sort(m.safe_events.begin(), m.safe_events.end(), by_id);
  std::sort(m.safety_goals.begin(), m.safety_goals.end(), by_id);

  if (!errs.empty()) {
    errs.insert(errs.end(), warns.begin(), warns.end());
    sort_diagnostics(errs);
    return errs;
  }
  if (warnings) {
    sort_diagnostics(warns);
    warnings->insert(warnings->end(), warns.begin(), warns.end());
  }
  return m;
}

/// Canonical re-serialization of a model as the six CSV documents
/// (file name -> content). parse_hara of the written directory yields an
/// equal model.
inline std::map<std::string, std::string> serialize_hara(const HaraModel& m) {
  std::map<std::string, std::string> out;

  csv::Table meta;
  meta.header = {"key", "value"};
  meta.rows.push_back({"system_name", m.system_name});
  meta.rows.push_back({"definition", m.definition});
  for (const auto& a : m.assumptions) meta.rows.push_back({"assumption", a});
  out["meta.csv"] = csv::write(meta);

  csv::Table sf;
  sf.header = {"id", "description"};
  for (const auto& f : m.functions) sf.rows.push_back({f.id, f.description});
  out["system_functions.csv"] = csv::write(sf);

  csv::Table mf;
  mf.header = {"id", "function_id", "description"};
  for (const auto& x : m.malfunctions) mf.rows.push_back({x.id, x.function_id, x.description});
  out["malfunctions.csv"] = csv::write(mf);

  csv::Table os;
  os.header = {"id", "description"};
  for (const auto& s : m.scenarios) os.rows.push_back({s.id, s.description});
  out["operational_scenarios.csv"] = csv::write(os);

  csv::Table he;
  he.header = {"id", "malfunction_id", "scenario_id", "effect", "severity",
               "exposure", "controllability", "rating", "safety_goal_id",
               "safety_goal_statement"};
  for (const auto& h : m.hazardous_events) {
    std::string stmt;
    if (!h.safety_goal_id.empty())
      if (const SafetyGoal* sg = m.safety_goal(h.safety_goal_id)) stmt = sg->statement;
    he.rows.push_back({h.id, h.malfunction_id, h.scenario_id, h.effect,
                       to_string(h.risk.severity), to_string(h.risk.exposure),
                       to_string(h.risk.controllability), to_string(h.risk.rating),
                       h.safety_goal_id, stmt});
  }
  out["hazardous_events.csv"] = csv::write(he);

  csv::Table se;
  se.header = {"id", "instruction", "scenario_id", "expected_outcome"};
  for (const auto& s : m.safe_events)
    se.rows.push_back({s.id, s.instruction, s.scenario_id, s.expected_outcome});
  out["safe_events.csv"] = csv::write(se);

  return out;
}

}  // namespace raise::hara
