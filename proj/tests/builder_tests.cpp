#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "raise/builder.hpp"
#include "raise/fixture.hpp"
#include "raise/pattern_dsl.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace raise;
using namespace raise::build;

namespace {

std::vector<Record> scenario_records(const hara::HaraModel& m) {
  std::vector<Record> out;
  for (const auto& os : m.scenarios) out.push_back({{"id", os.id}, {"description", os.description}});
  return out;
}

/// Per-scenario goals under a role-tagged branch (nodes carrying a
/// `scenario` tag reachable from the branch root).
std::vector<std::string> scenario_goals_under(const gsn::ArgumentGraph& g,
                                              const std::string& role) {
  std::vector<std::string> out;
  for (const auto& n : g.nodes()) {
    auto role_it = n.tags.find("role");
    if (role_it != n.tags.end() && role_it->second == role) {
      for (const auto& id : gsn::descendants(g, n.id)) {
        const gsn::GsnNode* d = g.find(id);
        if (d && d->kind == gsn::NodeKind::Goal && d->tags.count("scenario"))
          out.push_back(d->id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Removes `start` and everything reachable from it, dropping cut edges.
gsn::ArgumentGraph delete_subtree(const gsn::ArgumentGraph& g, const std::string& start) {
  auto doomed = gsn::descendants(g, start);
  std::vector<gsn::GsnNode> nodes;
  for (const auto& n : g.nodes())
    if (!doomed.count(n.id)) nodes.push_back(n);
  std::vector<gsn::GsnEdge> edges;
  for (const auto& e : g.edges())
    if (!doomed.count(e.source) && !doomed.count(e.target)) edges.push_back(e);
  return gsn::ArgumentGraph::from_parts(std::move(nodes), std::move(edges));
}

}  // namespace

TEST_CASE("instantiate_pattern") {
  auto lib = dsl::builtin_library();
  const dsl::Pattern& ri = lib.patterns.at("RI");
  auto sim = test_support::build_simlingo();

  SECTION("RI over the nine scenarios") {
    BindingSet b;
    b.scalars["system"] = "SimLingo";
    b.collections["scenario"] = scenario_records(sim.model);
    auto result = instantiate_pattern(ri, b, "");
    REQUIRE(result.ok());
    const auto& g = result.value();

    int per_scenario = 0;
    const gsn::GsnNode* os1_goal = nullptr;
    for (const auto& n : g.nodes()) {
      if (n.kind == gsn::NodeKind::Goal && n.tags.count("scenario")) {
        ++per_scenario;
        if (n.tags.at("scenario") == "OS1") os1_goal = &n;
      }
    }
    CHECK(per_scenario == 9);
    REQUIRE(os1_goal != nullptr);
    CHECK(os1_goal->statement.find("Vehicle at a intersection") != std::string::npos);
    CHECK_FALSE(os1_goal->uninstantiated);

    // Records carried only id/description, so the safety-goal and evidence
    // nodes stay unbound hot spots; the fragment still validates.
    CHECK(g.find("G3.1")->uninstantiated);
    CHECK(g.find("Sn1.1")->uninstantiated);
    CHECK_FALSE(has_errors(gsn::validate_graph(g, gsn::GraphMode::Fragment)));
  }
  SECTION("pattern without hot spots instantiates to its template") {
    auto parsed = dsl::parse_pattern(
        "pattern Plain v1\n"
        "node G1: Goal \"fixed claim\"\n"
        "node Sn1: Solution \"fixed evidence\"\n"
        "edge G1 -supportedBy-> Sn1\n");
    REQUIRE(parsed.ok());
    auto result = instantiate_pattern(parsed.value(), BindingSet{}, "");
    REQUIRE(result.ok());
    CHECK(result.value() == parsed.value().as_graph());
  }
  SECTION("missing required binding") {
    BindingSet b;
    b.collections["scenario"] = scenario_records(sim.model);
    auto result = instantiate_pattern(ri, b, "");
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::MissingBinding);
    CHECK(result.error().message.find("system") != std::string::npos);
  }
  SECTION("empty collection") {
    BindingSet b;
    b.scalars["system"] = "SimLingo";
    b.collections["scenario"] = {};
    auto result = instantiate_pattern(ri, b, "");
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::EmptyCollection);
  }
  SECTION("field access on a scalar binding") {
    auto parsed = dsl::parse_pattern(
        "pattern P v1\n"
        "param system: SystemName\n"
        "node G1: Goal \"{system.name} is safe\" undeveloped\n");
    REQUIRE(parsed.ok());
    BindingSet b;
    b.scalars["system"] = "SimLingo";
    auto result = instantiate_pattern(parsed.value(), b, "");
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::PlaceholderFieldUnknown);
  }
  SECTION("replicas follow binding order and take the id prefix") {
    BindingSet b;
    b.scalars["system"] = "X";
    b.collections["scenario"] = {{{"id", "OS2"}, {"description", "second"}},
                                 {{"id", "OS1"}, {"description", "first"}}};
    auto result = instantiate_pattern(ri, b, "RI.");
    REQUIRE(result.ok());
    CHECK(result.value().find("RI.G2.1")->tags.at("scenario") == "OS2");
    CHECK(result.value().find("RI.G2.2")->tags.at("scenario") == "OS1");
  }
  SECTION("choice nodes keep their alternatives and stay uninstantiated") {
    auto parsed = dsl::parse_pattern(
        "pattern P v1\n"
        "node G1: Goal \"pick some\" choice 1..2\n"
        "node G2: Goal \"alt a\" undeveloped\n"
        "node G3: Goal \"alt b\" undeveloped\n"
        "edge G1 -supportedBy-> G2\n"
        "edge G1 -supportedBy-> G3\n");
    REQUIRE(parsed.ok());
    auto result = instantiate_pattern(parsed.value(), BindingSet{}, "");
    REQUIRE(result.ok());
    CHECK(result.value().nodes().size() == 3);
    CHECK(result.value().find("G1")->uninstantiated);
  }
  SECTION("optional unbound scalar leaves the node uninstantiated") {
    auto parsed = dsl::parse_pattern(
        "pattern P v1\n"
        "param note: FreeText optional\n"
        "node G1: Goal \"claim ({note})\" undeveloped\n");
    REQUIRE(parsed.ok());
    auto result = instantiate_pattern(parsed.value(), BindingSet{}, "");
    REQUIRE(result.ok());
    CHECK(result.value().find("G1")->uninstantiated);
    CHECK(result.value().find("G1")->statement == "claim ({note})");
  }
  SECTION("doubled braces unescape to a literal brace") {
    // Only '{' is escaped; '}' is literal, so {{x} spells the text "{x}".
    auto parsed = dsl::parse_pattern(
        "pattern P v1\n"
        "param x: FreeText\n"
        "node G1: Goal \"{x} uses {{x} literally\" undeveloped\n");
    REQUIRE(parsed.ok());
    BindingSet b;
    b.scalars["x"] = "bound";
    auto result = instantiate_pattern(parsed.value(), b, "");
    REQUIRE(result.ok());
    CHECK(result.value().find("G1")->statement == "bound uses {x} literally");
    CHECK_FALSE(result.value().find("G1")->uninstantiated);
  }
}

TEST_CASE("instantiating random patterns yields valid fragments") {
  std::mt19937 rng(909090);
  int instantiated = 0;
  for (int i = 0; i < 150; ++i) {
    auto p = test_gen::random_pattern(rng);
    if (has_errors(dsl::validate_pattern(p))) continue;
    BindingSet b;
    for (const auto& hs : p.params) {
      if (hs.collection) {
        int count = test_gen::pick(rng, 1, 4);
        std::vector<Record> records;
        for (int k = 0; k < count; ++k)
          records.push_back({{"id", "E" + std::to_string(k + 1)},
                             {"field0", test_gen::random_text(rng, false)},
                             {"field1", test_gen::random_text(rng, false)},
                             {"field2", test_gen::random_text(rng, false)}});
        b.collections[hs.name] = std::move(records);
      } else {
        b.scalars[hs.name] = test_gen::random_text(rng, false);
      }
    }
    auto result = instantiate_pattern(p, b, "T.");
    CAPTURE(i, p.name);
    REQUIRE(result.ok());
    // Collection fields referenced outside a multiplicity subtree stay
    // unbound (a warning), but the fragment must be structurally sound.
    REQUIRE_FALSE(has_errors(gsn::validate_graph(result.value(), gsn::GraphMode::Fragment)));
    ++instantiated;
  }
  REQUIRE(instantiated >= 100);
}

TEST_CASE("load_config") {
  SECTION("full object") {
    auto parsed = load_config(R"({
      "system_name": "Demo",
      "contexts": ["ctx one", "ctx two"],
      "assumptions": ["assume"],
      "priority_threshold": "B",
      "reject_pattern": "MyRI",
      "accept_pattern": "MyAAI"
    })");
    REQUIRE(parsed.ok());
    const BuildConfig& cfg = parsed.value();
    CHECK(cfg.system_name == "Demo");
    CHECK(cfg.contexts.size() == 2);
    CHECK(cfg.assumptions == std::vector<std::string>{"assume"});
    CHECK(cfg.priority_threshold == hara::Rating::B);
    CHECK(cfg.patterns.reject == "MyRI");
    CHECK(cfg.patterns.accept == "MyAAI");
  }
  SECTION("defaults when keys are absent") {
    auto parsed = load_config("{}");
    REQUIRE(parsed.ok());
    CHECK(parsed.value().priority_threshold == hara::Rating::C);
    CHECK(parsed.value().patterns.reject == "RI");
    CHECK(parsed.value().patterns.accept == "AAI");
  }
  SECTION("bad threshold") {
    auto parsed = load_config(R"({"priority_threshold": "E"})");
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.diagnostics()[0].code == "CFG003");
  }
  SECTION("unknown key") {
    auto parsed = load_config(R"({"sytem_name": "typo"})");
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.diagnostics()[0].code == "CFG004");
  }
  SECTION("not an object") {
    CHECK_FALSE(load_config("[1,2]").ok());
    CHECK_FALSE(load_config("nonsense").ok());
  }
}

TEST_CASE("build_top_level on the SimLingo corpus") {
  auto sim = test_support::build_simlingo();
  gsn::ArgumentGraph top = build_top_level(sim.config, sim.model);

  SECTION("root, contexts and assumption") {
    const gsn::GsnNode* root = top.find("G.1");
    REQUIRE(root != nullptr);
    CHECK(root->statement == "SimLingo is sufficiently safe to use");
    int contexts = 0;
    bool carla = false;
    for (const auto& n : top.nodes()) {
      if (n.kind == gsn::NodeKind::Context) {
        ++contexts;
        carla = carla || n.statement == "SimLingo execution takes place in the CARLA simulator";
      }
    }
    CHECK(contexts == 4);
    CHECK(carla);
    const gsn::GsnNode* assumption = top.find("A.1");
    REQUIRE(assumption != nullptr);
    CHECK(assumption->kind == gsn::NodeKind::Assumption);
    CHECK(assumption->statement == "SimLingo is in action mode");
  }
  SECTION("one goal per system function, reject and accept siblings") {
    std::set<std::string> sf_tags;
    const gsn::GsnNode* sf1 = nullptr;
    for (const auto& n : top.nodes()) {
      auto it = n.tags.find("sf");
      if (it != n.tags.end()) {
        sf_tags.insert(it->second);
        if (it->second == "SF1") sf1 = &n;
      }
    }
    CHECK(sf_tags == std::set<std::string>{"SF1", "SF2", "SF3", "SF4", "SF5"});
    REQUIRE(sf1 != nullptr);
    CHECK(sf1->statement.find("process information properly based from the camera") !=
          std::string::npos);

    const gsn::GsnNode* reject = nullptr;
    const gsn::GsnNode* accept = nullptr;
    for (const auto& n : top.nodes()) {
      auto it = n.tags.find("role");
      if (it == n.tags.end()) continue;
      if (it->second == "reject") reject = &n;
      if (it->second == "accept") accept = &n;
    }
    REQUIRE(reject != nullptr);
    REQUIRE(accept != nullptr);
    CHECK(reject->tags.at("sf") == "SF5");  // derived from the reject function
    CHECK(reject->tags.at("alias") == "G3.2");
    CHECK(accept->tags.at("alias") == "G3.3");
    CHECK(reject->undeveloped);
    CHECK(accept->undeveloped);
  }
  SECTION("no contexts means no InContextOf edges and a validator warning") {
    BuildConfig bare;
    bare.system_name = "SimLingo";
    gsn::ArgumentGraph g = build_top_level(bare, sim.model);
    for (const auto& e : g.edges()) CHECK(e.kind != gsn::EdgeKind::InContextOf);
    auto diags = gsn::validate_graph(g);
    CHECK(std::any_of(diags.begin(), diags.end(),
                      [](const Diagnostic& d) { return d.code == "GSN022"; }));
    CHECK_FALSE(has_errors(diags));
  }
  SECTION("model without a reject function gets a synthesized reject goal") {
    hara::HaraModel m = sim.model;
    m.functions = {{"SF1", "Reach the destination"}};
    m.malfunctions.clear();
    gsn::ArgumentGraph g = build_top_level(sim.config, m);
    const gsn::GsnNode* reject = nullptr;
    for (const auto& n : g.nodes())
      if (n.tags.count("role") && n.tags.at("role") == "reject") reject = &n;
    REQUIRE(reject != nullptr);
    CHECK_FALSE(reject->tags.count("sf"));
  }
}

TEST_CASE("build_safety_case on the SimLingo corpus") {
  auto sim = test_support::build_simlingo();
  const gsn::ArgumentGraph& g = sim.output.safety_case;

  SECTION("nine scenario children under each instruction branch") {
    CHECK(scenario_goals_under(g, "reject").size() == 9);
    CHECK(scenario_goals_under(g, "accept").size() == 9);
  }
  SECTION("coverage passes and the graph validates without errors") {
    CHECK(sim.output.coverage.pass());
    auto diags = gsn::validate_graph(g);
    CHECK_FALSE(has_errors(diags));
  }
  SECTION("instruction branches are fully instantiated") {
    for (const char* role : {"reject", "accept"}) {
      const gsn::GsnNode* branch = nullptr;
      for (const auto& n : g.nodes())
        if (n.tags.count("role") && n.tags.at("role") == role) branch = &n;
      REQUIRE(branch != nullptr);
      CHECK_FALSE(branch->undeveloped);
      for (const auto& id : gsn::descendants(g, branch->id)) {
        CAPTURE(id);
        CHECK_FALSE(g.find(id)->uninstantiated);
      }
    }
  }
  SECTION("every solution carries exactly one HE or SE tag") {
    for (const auto& n : g.nodes()) {
      if (n.kind != gsn::NodeKind::Solution) continue;
      int evidence_tags = static_cast<int>(n.tags.count("he")) +
                          static_cast<int>(n.tags.count("se"));
      CAPTURE(n.id);
      CHECK(evidence_tags == 1);
    }
  }
  SECTION("safety goals appear as goal statements tagged with SG ids") {
    for (const auto& sg : sim.model.safety_goals) {
      bool found = false;
      for (const auto& n : g.nodes()) {
        auto it = n.tags.find("sg");
        if (it == n.tags.end() || it->second != sg.id) continue;
        CHECK(n.kind == gsn::NodeKind::Goal);
        CHECK(n.statement == sg.statement);
        found = true;
      }
      CAPTURE(sg.id);
      CHECK(found);
    }
  }
  SECTION("structural arithmetic") {
    auto top = hara::top_priority_hazards(sim.model, sim.config.priority_threshold);
    std::set<std::string> top_scenarios;
    for (const auto& he : top) top_scenarios.insert(he.scenario_id);
    CHECK(scenario_goals_under(g, "reject").size() == top_scenarios.size());

    int accept_solutions = 0;
    for (const auto& n : g.nodes())
      if (n.kind == gsn::NodeKind::Solution && n.tags.count("se")) ++accept_solutions;
    CHECK(accept_solutions == static_cast<int>(sim.model.safe_events.size()));
  }
  SECTION("deterministic output") {
    auto again = build_safety_case(sim.config, sim.model, dsl::builtin_library());
    REQUIRE(again.ok());
    CHECK(again.value().safety_case == g);
    CHECK(again.value().coverage == sim.output.coverage);
  }
  SECTION("empty safe events fail the accept branch") {
    hara::HaraModel m = sim.model;
    m.safe_events.clear();
    auto result = build_safety_case(sim.config, m, dsl::builtin_library());
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::EmptyCollection);
    CHECK(result.error().message.find("accept") != std::string::npos);
  }
  SECTION("threshold above every rating fails the reject branch") {
    hara::HaraModel m = sim.model;
    for (auto& he : m.hazardous_events)
      he.risk = {hara::Severity::S2, hara::Exposure::E4, hara::Controllability::C3,
                 hara::Rating::C};
    BuildConfig cfg = sim.config;
    cfg.priority_threshold = hara::Rating::D;
    auto result = build_safety_case(cfg, m, dsl::builtin_library());
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::EmptyCollection);
    CHECK(result.error().message.find("reject") != std::string::npos);
  }
  SECTION("unknown pattern name") {
    BuildConfig cfg = sim.config;
    cfg.patterns.reject = "NOPE";
    auto result = build_safety_case(cfg, sim.model, dsl::builtin_library());
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::PatternNotFound);
  }
}

TEST_CASE("coverage_check") {
  auto sim = test_support::build_simlingo();
  const gsn::ArgumentGraph& g = sim.output.safety_case;

  SECTION("full case passes") {
    auto report = coverage_check(g, sim.model, sim.config);
    CHECK(report.pass());
    CHECK(report.reject_scenarios.size() == 9);
    CHECK(report.accept_scenarios.size() == 9);
  }
  SECTION("deleting the OS3 subtree uncovers OS3 on the reject branch") {
    // RI collection is ordered by scenario id, so OS3 is the third replica.
    auto mutated = delete_subtree(g, "RI.G2.3");
    auto report = coverage_check(mutated, sim.model, sim.config);
    CHECK_FALSE(report.pass());
    bool found = false;
    for (const auto& [id, covered] : report.reject_scenarios)
      if (id == "OS3") {
        found = true;
        CHECK_FALSE(covered);
      }
    CHECK(found);
    for (const auto& [id, covered] : report.accept_scenarios) CHECK(covered);
  }
  SECTION("empty graph covers nothing") {
    auto report = coverage_check(gsn::ArgumentGraph{}, sim.model, sim.config);
    CHECK_FALSE(report.pass());
    for (const auto& [id, covered] : report.reject_scenarios) CHECK_FALSE(covered);
    for (const auto& [id, covered] : report.accept_scenarios) CHECK_FALSE(covered);
    CHECK(report.unsupported_safety_goals.size() == sim.model.safety_goals.size());
  }
  SECTION("agrees with the brute-force oracle on randomized cases") {
    std::mt19937 rng(160920);
    int compared = 0;
    for (int attempt = 0; attempt < 400 && compared < 220; ++attempt) {
      hara::Rating threshold = static_cast<hara::Rating>(test_gen::pick(rng, 0, 4));
      hara::HaraModel model = test_gen::random_hara_model(rng, threshold);
      BuildConfig cfg;
      cfg.priority_threshold = threshold;
      auto built = build_safety_case(cfg, model, dsl::builtin_library());
      REQUIRE(built.ok());
      gsn::ArgumentGraph mutated = built.value().safety_case;

      // Random damage: subtree deletions and flags.
      int deletions = test_gen::pick(rng, 0, 2);
      for (int d = 0; d < deletions && !mutated.nodes().empty(); ++d) {
        const auto& ns = mutated.nodes();
        const auto& victim = ns[test_gen::pick(rng, 0, static_cast<int>(ns.size()) - 1)];
        if (victim.id == "G.1") continue;
        mutated = delete_subtree(mutated, victim.id);
      }
      if (test_gen::chance(rng, 0.3) && !mutated.nodes().empty()) {
        auto nodes = mutated.nodes();
        nodes[test_gen::pick(rng, 0, static_cast<int>(nodes.size()) - 1)].uninstantiated = true;
        mutated = gsn::ArgumentGraph::from_parts(std::move(nodes), mutated.edges());
      }

      auto got = coverage_check(mutated, model, cfg);
      auto expected = test_oracle::brute_force_coverage(mutated, model, cfg);
      CAPTURE(attempt, model.hazardous_events.size(), mutated.nodes().size());
      REQUIRE(got == expected);
      ++compared;
    }
    REQUIRE(compared >= 220);
  }
}
