#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "liouplan/errors.hpp"
#include "liouplan/scenarios.hpp"
#include "liouplan/verify.hpp"
#include "support.hpp"

using namespace liouplan;
using nlohmann::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(LIOUPLAN_SOURCE_DIR) + "/scenarios/" + name);
  REQUIRE(in);
  return json::parse(in);
}

}  // namespace

TEST_CASE("academic builtins") {
  CHECK(builtin_academic(3).rhs_of("x1") == parse_expression("x2 + x3^2"));
  CHECK(builtin_academic(1).rhs_of("x1") == parse_expression("x2 + x1^2"));
  CHECK(builtin_academic(2).rhs_of("x2") == parse_expression("x3"));
  CHECK(builtin_academic(2).rhs_of("x3") == parse_expression("u"));
  CHECK_THROWS_AS(builtin_academic(0), InputError);
  CHECK_THROWS_AS(builtin_academic(4), InputError);
}

TEST_CASE("rolling builtin") {
  const SystemModel pb = builtin_rolling(parse_expression("1"), parse_expression("cos(v2)"));
  CHECK(pb.states == std::vector<std::string>{"v1", "w1", "v2", "w2", "psi"});
  const Expr expected = parse_expression("tan(v2)*(u1*sin(psi) + u2*cos(psi))");
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    Binding at;
    for (const char* n : {"v1", "w1", "v2", "w2", "psi", "u1", "u2"}) at[n] = testing_support::uniform(rng, -1.4, 1.4);
    CHECK(evaluate(pb.rhs_of("psi"), at) == doctest::Approx(evaluate(expected, at)).epsilon(1e-13));
  }

  const SystemModel flat = builtin_rolling(parse_expression("1"), parse_expression("1"));
  CHECK(flat.rhs_of("psi") == Expr::constant(0.0));
  CHECK_THROWS_AS(builtin_rolling(parse_expression("1"), parse_expression("0")), ZeroSurfaceFactor);
  CHECK_THROWS_AS(builtin_rolling(parse_expression("v1 - v1"), parse_expression("1")), ZeroSurfaceFactor);
  CHECK_THROWS_AS(builtin_rolling(parse_expression("v2"), parse_expression("1")), InputError);
  CHECK_THROWS_AS(builtin_rolling(parse_expression("1"), parse_expression("w1")), InputError);
}

TEST_CASE("rolling builtin simulates like the hand-written plate-ball model") {
  const SystemModel general = builtin_rolling(parse_expression("1"), parse_expression("cos(v2)"));
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 5; ++trial) {
    TrajectoryTable in(0.0, 1.0, 100);
    testing_support::fill_random_input(in, "u1", rng, 1.0);
    testing_support::fill_random_input(in, "u2", rng, 1.0);
    const std::vector<double> x0{0.1, -0.1, 0.2, 0.3, -0.2};
    const TrajectoryTable a = integrate_ode(general, in, x0);
    const TrajectoryTable b = integrate_ode(builtin_plateball(), in, x0);
    CHECK(compare(a, b, general.states, 1e-12).pass);
  }
}

TEST_CASE("rational plate-ball builtin") {
  const SystemModel r = builtin_plateball_rational();
  CHECK(r.states == std::vector<std::string>{"v1", "w1", "xi", "w2", "sigma"});
  const Binding at{{"v1", 0}, {"w1", 0}, {"xi", 0}, {"w2", 0}, {"sigma", 0}, {"u1", 1}, {"u2", 0}};
  CHECK(evaluate(r.rhs_of("xi"), at) == 0.5);
  Binding other = at;
  other["sigma"] = 0.7;
  other["u2"] = -2;
  CHECK(evaluate(r.rhs_of("sigma"), other) == 0.0);
}

TEST_CASE("plate-ball outputs") {
  Binding zero{{"v1", 0}, {"w1", 0}, {"v2", 0}, {"w2", 0}, {"psi", 0}};
  const PlateBallOutputs z = liouvillian_outputs_plateball(zero);
  CHECK(z.x == 0.0);
  CHECK(z.y == 0.0);
  CHECK(z.x_tilde == 0.0);
  CHECK(z.y_tilde == 0.0);

  Binding row{{"v1", 1}, {"w1", 0}, {"v2", 1}, {"w2", 0}, {"psi", 0}};
  CHECK(plateball_outputs(row).first == 0.0);
  CHECK(plateball_outputs(row).second == 0.0);

  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    Binding s;
    for (const char* n : {"v1", "w1", "w2"}) s[n] = testing_support::uniform(rng, -3, 3);
    s["v2"] = testing_support::uniform(rng, -3.0, 3.0);
    s["psi"] = testing_support::uniform(rng, -3.0, 3.0);
    const PlateBallOutputs o = liouvillian_outputs_plateball(s);
    CHECK(std::abs(o.x - o.x_tilde) <= 1e-9);
    CHECK(std::abs(o.y - o.y_tilde) <= 1e-9);
  }
}

TEST_CASE("system JSON") {
  CHECK(system_from_json(json("academic3")).rhs_of("x1") == parse_expression("x2 + x3^2"));
  CHECK(system_from_json(json{{"builtin", "academic"}, {"i", 1}}).name == "academic1");
  CHECK(system_from_json(json{{"builtin", "rolling"}, {"B", "1"}, {"C", "cos(v2)"}}).states.size() == 5);
  CHECK(is_plateball_reference(json("plateball")));
  CHECK(is_plateball_reference(json{{"builtin", "plateball_rational"}}));
  CHECK_FALSE(is_plateball_reference(json("academic3")));

  const SystemModel pb = builtin_plateball();
  const SystemModel back = system_from_json(system_to_json(pb));
  CHECK(back.states == pb.states);
  CHECK(back.inputs == pb.inputs);
  for (const auto& s : pb.states) CHECK(back.rhs_of(s) == pb.rhs_of(s));

  CHECK_THROWS_AS(system_from_json(json("warp_drive")), InputError);
  CHECK_THROWS_AS(system_from_json(json{{"states", {"x"}}, {"inputs", {"u"}}}), InputError);
  CHECK_THROWS_AS(system_from_json(json{{"states", {"x"}}, {"inputs", {"u"}}, {"rhs", {{"x", "u +"}}}}), InputError);
  CHECK_THROWS_AS(system_from_json(json{{"states", {"x"}}, {"inputs", {"u"}}, {"rhs", {{"x", "q"}}}}), InputError);
  CHECK_THROWS_AS(system_from_json(json{{"states", "x"}, {"inputs", {"u"}}, {"rhs", {{"x", "u"}}}}), InputError);
}

TEST_CASE("scenario JSON validation") {
  const json good = load("academic3_chain.json");
  const ScenarioConfig cfg = scenario_from_json(good);
  CHECK(cfg.grid.intervals == 200);
  CHECK(cfg.boundary.at("y").initial.size() == 3);
  CHECK(cfg.boundary.at("y").final[0].value == 1.0);

  auto broken = [&](auto edit) {
    json j = good;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["grid"]["N"] = 1; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["tolerance"] = 0; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j.erase("flatness_map"); })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["flatness_map"].erase("u"); })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["flatness_map"]["x1"] = "y"; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["mode"] = "magic"; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["initial_xi"] = {{"x2", 1}}; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["partition"]["xi"] = json::array(); })), InputError);
  CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["grid"]["N"] = "many"; })), InputError);
  CHECK_THROWS_AS(scenario_from_json(json::array()), InputError);
}

TEST_CASE("run_scenario examples") {
  const ScenarioResult a3 = run_scenario(scenario_from_json(load("academic3_chain.json")));
  CHECK(a3.exit_code == 0);
  CHECK(a3.report["pass"] == true);
  CHECK(a3.report["chain"][0]["kind"] == "Integral");
  CHECK(a3.report["errors"]["x1"]["sup"].get<double>() <= 1e-6);
  REQUIRE(a3.table.has_value());
  CHECK(a3.table->has_column("x1"));

  const ScenarioResult a1 = run_scenario(scenario_from_json(load("academic1_full_state.json")));
  CHECK(a1.exit_code == 0);
  CHECK(a1.report["chain"].empty());

  const ScenarioResult bad = run_scenario(scenario_from_json(load("academic3_misdeclared.json")));
  CHECK(bad.exit_code == 1);
  CHECK(bad.report["pass"] == false);
  CHECK(bad.report["failure"]["stage"] == "structure");
  CHECK(bad.report["failure"]["kind"] == "NotChain");
  CHECK(bad.report["failure"]["message"].get<std::string>().find("x2") != std::string::npos);

  const ScenarioResult pv = run_scenario(scenario_from_json(load("pv_unit_triangular.json")));
  CHECK(pv.exit_code == 0);
  CHECK(pv.report["classification"] == "UnitLowerTriangular");
}

TEST_CASE("run_scenario failure stages map to exit codes") {
  json j = load("academic3_chain.json");
  j["flatness_map"]["u"] = "ln(y - 0.5)";
  const ScenarioResult numeric = run_scenario(scenario_from_json(j));
  CHECK(numeric.exit_code == 3);
  CHECK(numeric.report["failure"]["stage"] == "synthesis");

  j = load("academic3_chain.json");
  j["flat_output"]["boundary"]["y"]["final"] = json::array({json::array({1, 0})});
  j["flat_output"]["boundary"]["y"]["initial"] = json::array({json::array({1, 0})});
  const ScenarioResult singular = run_scenario(scenario_from_json(j));
  CHECK(singular.exit_code == 3);
  CHECK(singular.report["failure"]["stage"] == "trajectory");

  j = load("academic3_chain.json");
  j["tolerance"] = 1e-13;
  const ScenarioResult strict = run_scenario(scenario_from_json(j));
  CHECK(strict.exit_code == 1);
  CHECK(strict.report["pass"] == false);
  CHECK_FALSE(strict.report.contains("failure"));

  j = load("pv_triangular.json");
  j["mode"] = "pv";
  j["system"]["rhs"]["z1"] = "z2";
  const ScenarioResult general = run_scenario(scenario_from_json(j));
  CHECK(general.exit_code == 2);
  CHECK(general.report["failure"]["stage"] == "structure");
}

TEST_CASE("run_scenario is deterministic") {
  const ScenarioConfig cfg = scenario_from_json(load("pv_triangular.json"));
  json a = run_scenario(cfg).report;
  json b = run_scenario(cfg).report;
  a.erase("runtime_ms");
  b.erase("runtime_ms");
  CHECK(a == b);
}

TEST_CASE("plate-ball scenarios carry the provenance note") {
  json j = load("academic3_chain.json");
  j["system"] = "plateball";
  j["partition"] = {{"eta", {"v1", "w1", "v2", "w2", "psi"}}, {"xi", json::array()}};
  j["flatness_map"] = {{"v1", "y"}, {"w1", "0"}, {"v2", "0"}, {"w2", "0"}, {"psi", "0"}, {"u1", "y'"}, {"u2", "0"}};
  j.erase("initial_xi");
  const ScenarioConfig cfg = scenario_from_json(j);
  bool noted = false;
  for (const auto& n : cfg.notes) noted = noted || n.find("cos(v2)") != std::string::npos;
  CHECK(noted);
}
