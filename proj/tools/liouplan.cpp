// liouplan command-line front end: analyze, plan, simulate, verify.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "liouplan/errors.hpp"
#include "liouplan/scenarios.hpp"
#include "liouplan/structure.hpp"
#include "liouplan/table_io.hpp"
#include "liouplan/verify.hpp"

using nlohmann::json;
using namespace liouplan;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw InputError("cannot write '" + path + "'");
}

// "1,2,3" in state order, or "x1=1,x3=2" by name (missing states start at 0).
std::vector<double> parse_x0(const std::string& text, const SystemModel& sys) {
  std::vector<double> x0(sys.states.size(), 0.0);
  std::vector<std::string> items;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) items.push_back(item);
  }
  const bool named = !items.empty() && items.front().find('=') != std::string::npos;
  if (!named && items.size() != sys.states.size()) {
    throw InputError("--x0 needs " + std::to_string(sys.states.size()) + " values");
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string name;
    std::string value = items[i];
    if (named) {
      const auto eq = items[i].find('=');
      if (eq == std::string::npos) throw InputError("--x0: mix of named and positional values");
      name = items[i].substr(0, eq);
      value = items[i].substr(eq + 1);
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw InputError("--x0: '" + value + "' is not a number");
    }
    if (!named) {
      x0[i] = v;
      continue;
    }
    auto it = std::find(sys.states.begin(), sys.states.end(), name);
    if (it == sys.states.end()) throw InputError("--x0: unknown state '" + name + "'");
    x0[static_cast<std::size_t>(it - sys.states.begin())] = v;
  }
  return x0;
}

json chain_json(const ExtensionChain& chain) {
  json out = json::array();
  for (const auto& s : chain.steps) {
    out.push_back({{"var", s.var}, {"kind", to_string(s.kind)}, {"alpha", to_string(s.alpha)}});
  }
  return out;
}

int cmd_analyze(const std::string& system_path, const std::string& partition_text) {
  const json sys_json = load_json(system_path);
  const SystemModel sys = system_from_json(sys_json);
  const Partition part = parse_partition(partition_text);
  part.validate(sys);

  json out = {{"system", sys.name}, {"eta", part.eta}, {"xi", part.xi}};
  if (is_plateball_reference(sys_json)) {
    std::cerr << "note: plate-ball builtin uses dw2/dt = -(1/cos v2)(u1 sin psi + u2 cos psi)\n";
  }
  int code = 0;
  try {
    out["chain"] = chain_json(check_chain_structure(sys, part));
  } catch (const StructureError& e) {
    out["chain"] = nullptr;
    out["chain_failure"] = {{"kind", to_string(e.kind())}, {"var", e.var()}, {"reason", e.reason()}};
    code = 1;
  }
  try {
    const PVForm pv = extract_pv_form(sys, part);
    out["classification"] = to_string(pv.classification());
    json rows = json::array();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < pv.size(); ++j) row.push_back(to_string(pv.entry(i, j)));
      rows.push_back(row);
    }
    out["matrix"] = rows;
  } catch (const StructureError& e) {
    out["classification"] = "NotPV";
    out["pv_failure"] = {{"kind", to_string(e.kind())}, {"var", e.var()}, {"reason", e.reason()}};
  }
  std::cout << out.dump(2) << "\n";
  return code;
}

void print_notes(const json& report) {
  for (const auto& n : report["notes"]) std::cerr << "note: " << n.get<std::string>() << "\n";
}

int cmd_plan(const std::string& scenario_path, const std::string& csv_path,
             const std::string& report_path) {
  const ScenarioConfig cfg = scenario_from_json(load_json(scenario_path));
  const ScenarioResult result = run_scenario(cfg);
  if (!csv_path.empty() && result.table) write_csv_file(csv_path, *result.table);
  if (!report_path.empty()) write_text_atomic(report_path, result.report.dump(2) + "\n");
  print_notes(result.report);
  std::cout << cfg.name << ": " << (result.report["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  return result.exit_code;
}

int cmd_simulate(const std::string& system_path, const std::string& inputs_path,
                 const std::string& x0_text, int substeps, const std::string& csv_path) {
  const json sys_json = load_json(system_path);
  const SystemModel sys = system_from_json(sys_json);
  if (is_plateball_reference(sys_json)) {
    std::cerr << "note: plate-ball builtin uses dw2/dt = -(1/cos v2)(u1 sin psi + u2 cos psi)\n";
  }
  const TrajectoryTable inputs = read_csv_file(inputs_path);
  const std::vector<double> x0 = parse_x0(x0_text, sys);
  const TrajectoryTable states = integrate_ode(sys, inputs, x0, substeps);
  if (csv_path.empty() || csv_path == "-") {
    write_csv(std::cout, states);
  } else {
    write_csv_file(csv_path, states);
  }
  return 0;
}

int cmd_verify(const std::string& scenario_path, long long grid, int substeps, double tol,
               long long seed) {
  json j = load_json(scenario_path);
  if (grid > 0) j["grid"]["N"] = grid;
  if (substeps > 0) j["substeps"] = substeps;
  if (tol > 0.0) j["tolerance"] = tol;
  if (seed >= 0) j["seed"] = seed;
  const ScenarioConfig cfg = scenario_from_json(j);
  const ScenarioResult result = run_scenario(cfg);
  print_notes(result.report);
  std::cout << result.report.dump(2) << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan and verify trajectories of Liouvillian control systems"};
  app.require_subcommand(1);

  std::string path;
  std::string partition;
  auto* analyze = app.add_subcommand("analyze", "Check chain and linear-extension structure");
  analyze->add_option("system", path, "System JSON")->required();
  analyze->add_option("--partition", partition, "eta=a,b,xi=c")->required();

  std::string csv_out;
  std::string report_out;
  auto* plan = app.add_subcommand("plan", "Run a scenario and write the planned trajectory");
  plan->add_option("scenario", path, "Scenario JSON")->required();
  plan->add_option("-o,--output", csv_out, "Trajectory CSV");
  plan->add_option("--report", report_out, "Report JSON");

  std::string inputs;
  std::string x0;
  int substeps = kDefaultSubsteps;
  auto* simulate = app.add_subcommand("simulate", "RK4 simulation from sampled inputs");
  simulate->add_option("system", path, "System JSON")->required();
  simulate->add_option("--inputs", inputs, "Input CSV (t plus one column per input)")->required();
  simulate->add_option("--x0", x0, "Initial state: 'a,b,c' or 'x1=a,x2=b'")->required();
  simulate->add_option("--substeps", substeps, "RK4 steps per grid interval")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--output", csv_out, "State CSV ('-' for stdout)");

  long long grid = 0;
  int verify_substeps = 0;
  double tol = 0.0;
  long long seed = -1;
  auto* verify = app.add_subcommand("verify", "Run a scenario and print its report");
  verify->add_option("scenario", path, "Scenario JSON")->required();
  verify->add_option("--grid", grid, "Grid intervals N")->check(CLI::PositiveNumber);
  verify->add_option("--substeps", verify_substeps, "RK4 steps per grid interval")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol, "Sup-norm tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Seed for randomized zero tests")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(path, partition);
    if (*plan) return cmd_plan(path, csv_out, report_out);
    if (*simulate) return cmd_simulate(path, inputs, x0, substeps, csv_out);
    if (*verify) return cmd_verify(path, grid, verify_substeps, tol, seed);
  } catch (const StructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
