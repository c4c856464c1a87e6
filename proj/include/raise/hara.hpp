#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raise/csv.hpp"
#include "raise/diag.hpp"

namespace raise::hara {

enum class Severity { S0, S1, S2, S3 };
enum class Exposure { E0, E1, E2, E3, E4 };
enum class Controllability { C0, C1, C2, C3 };
enum class Rating { QM, A, B, C, D };

inline const char* to_string(Severity s) {
  static constexpr const char* names[] = {"S0", "S1", "S2", "S3"};
  return names[static_cast<int>(s)];
}
inline const char* to_string(Exposure e) {
  static constexpr const char* names[] = {"E0", "E1", "E2", "E3", "E4"};
  return names[static_cast<int>(e)];
}
inline const char* to_string(Controllability c) {
  static constexpr const char* names[] = {"C0", "C1", "C2", "C3"};
  return names[static_cast<int>(c)];
}
inline const char* to_string(Rating r) {
  static constexpr const char* names[] = {"QM", "A", "B", "C", "D"};
  return names[static_cast<int>(r)];
}

inline std::optional<Severity> severity_from(std::string_view s) {
  for (int i = 0; i <= 3; ++i)
    if (s == to_string(static_cast<Severity>(i))) return static_cast<Severity>(i);
  return std::nullopt;
}
inline std::optional<Exposure> exposure_from(std::string_view s) {
  for (int i = 0; i <= 4; ++i)
    if (s == to_string(static_cast<Exposure>(i))) return static_cast<Exposure>(i);
  return std::nullopt;
}
inline std::optional<Controllability> controllability_from(std::string_view s) {
  for (int i = 0; i <= 3; ++i)
    if (s == to_string(static_cast<Controllability>(i))) return static_cast<Controllability>(i);
  return std::nullopt;
}
inline std::optional<Rating> rating_from(std::string_view s) {
  for (int i = 0; i <= 4; ++i)
    if (s == to_string(static_cast<Rating>(i))) return static_cast<Rating>(i);
  return std::nullopt;
}

/// 4x5x4 severity/exposure/controllability -> rating lookup. The default
/// scheme follows the automotive standard determination table, extended so
/// that class 0 in any factor yields QM; it can be replaced wholesale by
/// loading a different 80-row table.
class RiskTable {
 public:
  static RiskTable standard() {
    RiskTable t;
    // cells[s-1][e-1][c-1] for S1..S3, E1..E4, C1..C3
    static constexpr Rating q = Rating::QM, a = Rating::A, b = Rating::B, c = Rating::C,
                            d = Rating::D;
    static constexpr Rating cells[3][4][3] = {
        {{q, q, q}, {q, q, q}, {q, q, a}, {q, a, b}},
        {{q, q, q}, {q, q, a}, {q, a, b}, {a, b, c}},
        {{q, q, a}, {q, a, b}, {a, b, c}, {b, c, d}},
    };
    for (int s = 0; s <= 3; ++s)
      for (int e = 0; e <= 4; ++e)
        for (int cc = 0; cc <= 3; ++cc)
          t.cell(s, e, cc) = (s == 0 || e == 0 || cc == 0) ? Rating::QM
                                                           : cells[s - 1][e - 1][cc - 1];
    return t;
  }

  Rating rating(Severity s, Exposure e, Controllability c) const {
    return cells_[static_cast<int>(s)][static_cast<int>(e)][static_cast<int>(c)];
  }

  /// Loads `severity,exposure,controllability,rating` rows; exactly one row
  /// per triple. Non-monotone tables are reported as warnings.
  static ParseResult<RiskTable> load(std::string_view csv_text) {
    auto parsed = csv::parse(csv_text, "asil_table.csv");
    if (!parsed) return parsed.diagnostics();
    const csv::Table& t = parsed.value();
    std::vector<Diagnostic> diags;
    if (t.header != std::vector<std::string>{"severity", "exposure", "controllability", "rating"})
      diags.push_back(err("HAR002", "asil_table.csv header must be "
                                    "severity,exposure,controllability,rating",
                          "asil_table.csv:1"));
    RiskTable table;
    bool seen[4][5][4] = {};
    for (size_t i = 0; i < t.rows.size() && diags.empty(); ++i) {
      const auto& row = t.rows[i];
      std::string locus = "asil_table.csv:" + std::to_string(i + 2);
      if (row.size() != 4) {
        diags.push_back(err("HAR003", "expected 4 fields", locus));
        continue;
      }
      auto s = severity_from(row[0]);
      auto e = exposure_from(row[1]);
      auto c = controllability_from(row[2]);
      auto r = rating_from(row[3]);
      if (!s || !e || !c || !r) {
        diags.push_back(err("HAR008", "unknown severity/exposure/controllability/rating value",
                            locus));
        continue;
      }
      bool& mark = seen[static_cast<int>(*s)][static_cast<int>(*e)][static_cast<int>(*c)];
      if (mark) {
        diags.push_back(err("HAR012", "duplicate rating table row", locus));
        continue;
      }
      mark = true;
      table.cell(static_cast<int>(*s), static_cast<int>(*e), static_cast<int>(*c)) = *r;
    }
    if (diags.empty()) {
      for (int s = 0; s <= 3; ++s)
        for (int e = 0; e <= 4; ++e)
          for (int c = 0; c <= 3; ++c)
            if (!seen[s][e][c])
              diags.push_back(err("HAR012", std::string("rating table is missing the ") +
                                                to_string(static_cast<Severity>(s)) + "," +
                                                to_string(static_cast<Exposure>(e)) + "," +
                                                to_string(static_cast<Controllability>(c)) +
                                                " row",
                                  "asil_table.csv"));
    }
    if (!diags.empty()) return diags;
    return table;
  }

  /// Emits the table in canonical S-major, then E, then C order (80 rows).
  std::string to_csv() const {
    csv::Table t;
    t.header = {"severity", "exposure", "controllability", "rating"};
    for (int s = 0; s <= 3; ++s)
      for (int e = 0; e <= 4; ++e)
        for (int c = 0; c <= 3; ++c)
          t.rows.push_back({to_string(static_cast<Severity>(s)),
                            to_string(static_cast<Exposure>(e)),
                            to_string(static_cast<Controllability>(c)),
                            to_string(cells_[s][e][c])});
    return csv::write(t);
  }

  /// Raising any single factor must never lower the rating.
  std::vector<Diagnostic> monotonicity_findings() const {
    std::vector<Diagnostic> out;
    auto check = [&](int s, int e, int c, int s2, int e2, int c2) {
      if (cells_[s2][e2][c2] < cells_[s][e][c])
        out.push_back(warn("HAR015", std::string("rating drops from ") +
                                         to_string(cells_[s][e][c]) + " to " +
                                         to_string(cells_[s2][e2][c2]) + " when raising a factor",
                           std::string(to_string(static_cast<Severity>(s2))) + "," +
                               to_string(static_cast<Exposure>(e2)) + "," +
                               to_string(static_cast<Controllability>(c2))));
    };
    for (int s = 0; s <= 3; ++s)
      for (int e = 0; e <= 4; ++e)
        for (int c = 0; c <= 3; ++c) {
          if (s < 3) check(s, e, c, s + 1, e, c);
          if (e < 4) check(s, e, c, s, e + 1, c);
          if (c < 3) check(s, e, c, s, e, c + 1);
        }
    return out;
  }

  friend bool operator==(const RiskTable&, const RiskTable&) = default;

 private:
  Rating& cell(int s, int e, int c) { return cells_[s][e][c]; }
  std::array<std::array<std::array<Rating, 4>, 5>, 4> cells_{};
};

/// Rating lookup in the standard shipped table.
inline Rating risk_rating(Severity s, Exposure e, Controllability c) {
  static const RiskTable table = RiskTable::standard();
  return table.rating(s, e, c);
}

struct RiskAssessment {
  Severity severity = Severity::S0;
  Exposure exposure = Exposure::E0;
  Controllability controllability = Controllability::C0;
  Rating rating = Rating::QM;

  friend bool operator==(const RiskAssessment&, const RiskAssessment&) = default;
};

struct SystemFunction {
  std::string id;  // SF<digits>
  std::string description;
  friend bool operator==(const SystemFunction&, const SystemFunction&) = default;
};

struct Malfunction {
  std::string id;  // MF<digits>
  std::string function_id;
  std::string description;
  friend bool operator==(const Malfunction&, const Malfunction&) = default;
};

struct OperationalScenario {
  std::string id;  // OS<digits>
  std::string description;
  friend bool operator==(const OperationalScenario&, const OperationalScenario&) = default;
};

struct HazardousEvent {
  std::string id;  // HE<digits>
  std::string malfunction_id;
  std::string scenario_id;
  std::string effect;
  RiskAssessment risk;
  std::string safety_goal_id;  // empty when none assigned
  friend bool operator==(const HazardousEvent&, const HazardousEvent&) = default;
};

/// HARA extension row: a safe instruction and its expected outcome in one
/// scenario. Deliberately carries no risk assessment.
struct SafeEvent {
  std::string id;  // SE<digits>
  std::string instruction;
  std::string scenario_id;
  std::string expected_outcome;
  friend bool operator==(const SafeEvent&, const SafeEvent&) = default;
};

struct SafetyGoal {
  std::string id;  // SG<digits>
  std::string statement;
  Rating priority = Rating::QM;  // worst rating among linked hazardous events
  friend bool operator==(const SafetyGoal&, const SafetyGoal&) = default;
};

struct HaraModel {
  std::string system_name;
  std::string definition;
  std::vector<std::string> assumptions;
  std::vector<SystemFunction> functions;
  std::vector<Malfunction> malfunctions;
  std::vector<OperationalScenario> scenarios;
  std::vector<HazardousEvent> hazardous_events;
  std::vector<SafeEvent> safe_events;
  std::vector<SafetyGoal> safety_goals;

  const OperationalScenario* scenario(std::string_view id) const {
    for (const auto& s : scenarios)
      if (s.id == id) return &s;
    return nullptr;
  }
  const SystemFunction* function(std::string_view id) const {
    for (const auto& f : functions)
      if (f.id == id) return &f;
    return nullptr;
  }
  const Malfunction* malfunction(std::string_view id) const {
    for (const auto& m : malfunctions)
      if (m.id == id) return &m;
    return nullptr;
  }
  const HazardousEvent* hazardous_event(std::string_view id) const {
    for (const auto& h : hazardous_events)
      if (h.id == id) return &h;
    return nullptr;
  }
  const SafeEvent* safe_event(std::string_view id) const {
    for (const auto& s : safe_events)
      if (s.id == id) return &s;
    return nullptr;
  }
  const SafetyGoal* safety_goal(std::string_view id) const {
    for (const auto& g : safety_goals)
      if (g.id == id) return &g;
    return nullptr;
  }

  friend bool operator==(const HaraModel&, const HaraModel&) = default;
};

/// Checks the rules that depend on the priority threshold: every hazardous
/// event rated at or above it carries a safety goal (HAR030, error), every
/// safe event scenario resolves (HAR032, error), and every scenario is used
/// by at least one hazardous or safe event (HAR031, warning).
inline std::vector<Diagnostic> validate_hara(const HaraModel& m, Rating threshold) {
  std::vector<Diagnostic> out;
  for (const auto& he : m.hazardous_events)
    if (he.risk.rating >= threshold && he.safety_goal_id.empty())
      out.push_back(err("HAR030", "hazardous event rated " + std::string(to_string(he.risk.rating)) +
                                      " (>= threshold " + to_string(threshold) +
                                      ") has no safety goal",
                        he.id));
  for (const auto& se : m.safe_events)
    if (!m.scenario(se.scenario_id))
      out.push_back(err("HAR032", "safe event references unknown scenario '" + se.scenario_id + "'",
                        se.id));
  for (const auto& os : m.scenarios) {
    bool used = std::any_of(m.hazardous_events.begin(), m.hazardous_events.end(),
                            [&](const HazardousEvent& he) { return he.scenario_id == os.id; }) ||
                std::any_of(m.safe_events.begin(), m.safe_events.end(),
                            [&](const SafeEvent& se) { return se.scenario_id == os.id; });
    if (!used)
      out.push_back(warn("HAR031", "scenario is referenced by no hazardous or safe event", os.id));
  }
  sort_diagnostics(out);
  return out;
}

/// Hazardous events rated at or above `threshold`, ordered by rating
/// descending then id ascending.
inline std::vector<HazardousEvent> top_priority_hazards(const HaraModel& m, Rating threshold) {
  std::vector<HazardousEvent> out;
  for (const auto& he : m.hazardous_events)
    if (he.risk.rating >= threshold) out.push_back(he);
  std::sort(out.begin(), out.end(), [](const HazardousEvent& a, const HazardousEvent& b) {
    if (a.risk.rating != b.risk.rating) return a.risk.rating > b.risk.rating;
    return raise::detail::natural_less(a.id, b.id);
  });
  return out;
}

}  // namespace raise::hara
