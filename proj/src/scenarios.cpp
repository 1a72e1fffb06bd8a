#include "liouplan/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "liouplan/errors.hpp"
#include "liouplan/pv_form.hpp"
#include "liouplan/quadrature.hpp"
#include "liouplan/verify.hpp"

namespace liouplan {

using nlohmann::json;

namespace {

Expr var(const char* name) { return Expr::variable(name); }
Expr fn(UnaryFn f, const Expr& e) { return Expr::unary(f, e); }

const char* kPlateBallNote =
    "plate-ball model uses dw2/dt = -(1/cos v2)(u1 sin psi + u2 cos psi), i.e. C = cos(v2)";

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing required field '") + key + "'");
  return *it;
}

std::vector<BoundaryCondition> parse_conditions(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + " must be an array");
  std::vector<BoundaryCondition> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& item = j[i];
    if (item.is_number()) {
      out.push_back({static_cast<int>(i), item.get<double>()});
    } else if (item.is_array() && item.size() == 2) {
      out.push_back({item[0].get<int>(), item[1].get<double>()});
    } else {
      throw InputError(where + ": each entry is a number or an [order, value] pair");
    }
  }
  return out;
}

json chain_to_json(const ExtensionChain& chain) {
  json out = json::array();
  for (const auto& s : chain.steps) {
    out.push_back({{"var", s.var}, {"kind", to_string(s.kind)}, {"alpha", to_string(s.alpha)}});
  }
  return out;
}

json matrix_to_json(const PVForm& pv) {
  json rows = json::array();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < pv.size(); ++j) row.push_back(to_string(pv.entry(i, j)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Built-in systems

SystemModel builtin_academic(int i) {
  if (i < 1 || i > 3) throw InputError("academic example index must be 1, 2 or 3");
  const std::string xi = "x" + std::to_string(i);
  return make_system("academic" + std::to_string(i), {"x1", "x2", "x3"}, {"u"},
                     {{"x1", "x2 + " + xi + "^2"}, {"x2", "x3"}, {"x3", "u"}});
}

SystemModel builtin_rolling(const Expr& b, const Expr& c) {
  for (const auto& v : variables(b)) {
    if (v != "v1" && v != "w1") throw InputError("B may depend on v1 and w1 only, found '" + v + "'");
  }
  for (const auto& v : variables(c)) {
    if (v != "v2" && v != "w2") throw InputError("C may depend on v2 and w2 only, found '" + v + "'");
  }
  if (probably_zero(b)) throw ZeroSurfaceFactor("surface factor B is identically zero");
  if (probably_zero(c)) throw ZeroSurfaceFactor("surface factor C is identically zero");

  const Expr b_v1 = partial_derivative(b, "v1");
  const Expr c_v2 = partial_derivative(c, "v2");
  const Expr u1 = var("u1");
  const Expr u2 = var("u2");
  const Expr sin_psi = fn(UnaryFn::Sin, var("psi"));
  const Expr cos_psi = fn(UnaryFn::Cos, var("psi"));
  const Expr twist = u1 * sin_psi + u2 * cos_psi;
  const Expr one = Expr::constant(1.0);

  SystemModel sys{"rolling", {"v1", "w1", "v2", "w2", "psi"}, {"u1", "u2"}, {}};
  sys.rhs["v1"] = u1;
  sys.rhs["w1"] = simplify((one / b) * u2);
  sys.rhs["v2"] = simplify(u1 * cos_psi - u2 * sin_psi);
  sys.rhs["w2"] = simplify(-((one / c) * twist));
  sys.rhs["psi"] = simplify((b_v1 / b) * u2 - (c_v2 / c) * twist);
  sys.validate();
  return sys;
}

SystemModel builtin_plateball() {
  return make_system("plateball", {"v1", "w1", "v2", "w2", "psi"}, {"u1", "u2"},
                     {{"v1", "u1"},
                      {"w1", "u2"},
                      {"v2", "u1*cos(psi) - u2*sin(psi)"},
                      {"w2", "-(1/cos(v2))*(u1*sin(psi) + u2*cos(psi))"},
                      {"psi", "tan(v2)*(u1*sin(psi) + u2*cos(psi))"}});
}

SystemModel builtin_plateball_rational() {
  return make_system(
      "plateball_rational", {"v1", "w1", "xi", "w2", "sigma"}, {"u1", "u2"},
      {{"v1", "u1"},
       {"w1", "u2"},
       {"xi", "(1 + xi^2)/(2*(1 + sigma^2))*((1 - sigma^2)*u1 - 2*sigma*u2)"},
       {"w2", "-(1 + xi^2)/((1 - xi^2)*(1 + sigma^2))*(2*sigma*u1 + (1 - sigma^2)*u2)"},
       {"sigma", "xi/(1 - xi^2)*(2*sigma*u1 + (1 - sigma^2)*u2)"}});
}

std::pair<double, double> plateball_outputs(const Binding& row) {
  const double v1 = row.at("v1"), w1 = row.at("w1"), v2 = row.at("v2"), w2 = row.at("w2");
  const double psi = row.at("psi");
  return {v1 - v2 * std::cos(psi), w1 + w2 * std::sin(psi)};
}

std::pair<double, double> plateball_rational_outputs(const Binding& row) {
  const double v1 = row.at("v1"), w1 = row.at("w1"), w2 = row.at("w2");
  const double xi = row.at("xi"), sigma = row.at("sigma");
  const double denom = 1.0 + sigma * sigma;
  return {v1 - (1.0 - sigma * sigma) / denom * 2.0 * std::atan(xi), w1 + 2.0 * sigma / denom * w2};
}

PlateBallOutputs liouvillian_outputs_plateball(const Binding& row) {
  Binding full = row;
  if (!full.count("xi")) full["xi"] = std::tan(row.at("v2") / 2.0);
  if (!full.count("sigma")) full["sigma"] = std::tan(row.at("psi") / 2.0);
  const auto [x, y] = plateball_outputs(full);
  const auto [xt, yt] = plateball_rational_outputs(full);
  return {x, y, xt, yt};
}

// ---------------------------------------------------------------------------
// JSON

bool is_plateball_reference(const json& j) {
  std::string name;
  if (j.is_string()) name = j.get<std::string>();
  else if (j.is_object() && j.contains("builtin") && j["builtin"].is_string()) name = j["builtin"].get<std::string>();
  return name == "plateball" || name == "plateball_rational";
}

SystemModel system_from_json(const json& j, int jet_order) {
  try {
    if (j.is_string() || (j.is_object() && j.contains("builtin"))) {
      const std::string name = j.is_string() ? j.get<std::string>() : j["builtin"].get<std::string>();
      if (name == "academic") return builtin_academic(require(j, "i").get<int>());
      if (name.rfind("academic", 0) == 0 && name.size() == 9) return builtin_academic(name[8] - '0');
      if (name == "plateball") return builtin_plateball();
      if (name == "plateball_rational") return builtin_plateball_rational();
      if (name == "rolling") {
        const std::string b = j.is_object() ? get_or<std::string>(j, "B", "1") : "1";
        const std::string c = j.is_object() ? get_or<std::string>(j, "C", "1") : "1";
        return builtin_rolling(parse_expression(b), parse_expression(c));
      }
      throw InputError("unknown builtin system '" + name + "'");
    }
    if (!j.is_object()) throw InputError("system must be an object or a builtin name");
    std::map<std::string, std::string> rhs;
    for (const auto& [state, text] : require(j, "rhs").items()) rhs[state] = text.get<std::string>();
    return make_system(get_or<std::string>(j, "name", "system"),
                       require(j, "states").get<std::vector<std::string>>(),
                       require(j, "inputs").get<std::vector<std::string>>(), rhs, jet_order);
  } catch (const json::exception& e) {
    throw InputError(std::string("system JSON: ") + e.what());
  }
}

json system_to_json(const SystemModel& sys) {
  json rhs = json::object();
  for (const auto& [state, e] : sys.rhs) rhs[state] = to_string(e);
  return {{"name", sys.name}, {"states", sys.states}, {"inputs", sys.inputs}, {"rhs", rhs}};
}

// ---------------------------------------------------------------------------
// Scenarios

void ScenarioConfig::validate() const {
  system.validate(jet_order);
  partition.validate(system);
  if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
  if (grid.intervals < 2) throw InputError("grid N must be at least 2");
  if (!(grid.t0 < grid.tf)) throw InputError("grid needs t0 < tf");
  if (substeps < 1) throw InputError("substeps must be at least 1");
  if (boundary.empty()) throw InputError("scenario declares no flat outputs");
  if (flatness_map.empty()) throw InputError("scenario has an empty flatness map");

  std::set<std::string> covered;
  for (const auto& [name, _] : flatness_map) covered.insert(name);
  for (const auto& e : partition.eta) {
    if (!covered.count(e)) throw InputError("flatness map does not cover eta state '" + e + "'");
  }
  for (const auto& u : system.inputs) {
    if (!covered.count(u)) throw InputError("flatness map does not cover input '" + u + "'");
  }
  for (const auto& x : partition.xi) {
    if (covered.count(x)) throw InputError("flatness map must not define extension state '" + x + "'");
  }
  for (const auto& [name, _] : initial_xi) {
    if (std::find(partition.xi.begin(), partition.xi.end(), name) == partition.xi.end()) {
      throw InputError("initial value given for '" + name + "', which is not an extension state");
    }
  }
}

ScenarioConfig scenario_from_json(const json& j) {
  try {
    if (!j.is_object()) throw InputError("scenario must be a JSON object");
    ScenarioConfig cfg;
    cfg.name = get_or<std::string>(j, "name", "scenario");
    cfg.jet_order = get_or<int>(j, "jet_order", kDefaultJetOrder);
    const json& sys = require(j, "system");
    cfg.system = system_from_json(sys, cfg.jet_order);
    if (is_plateball_reference(sys)) cfg.notes.emplace_back(kPlateBallNote);

    const json& part = require(j, "partition");
    if (part.is_string()) {
      cfg.partition = parse_partition(part.get<std::string>());
    } else {
      cfg.partition.eta = get_or<std::vector<std::string>>(part, "eta", {});
      cfg.partition.xi = get_or<std::vector<std::string>>(part, "xi", {});
    }

    const std::string mode = get_or<std::string>(j, "mode", "chain");
    if (mode == "chain") cfg.mode = ScenarioMode::Chain;
    else if (mode == "pv") cfg.mode = ScenarioMode::PV;
    else throw InputError("mode must be 'chain' or 'pv'");

    const json& bnd = require(require(j, "flat_output"), "boundary");
    for (const auto& [out, spec] : bnd.items()) {
      if (!is_valid_variable_name(out) || split_primes(out).second != 0) {
        throw InputError("invalid flat-output name '" + out + "'");
      }
      cfg.boundary[out] = {parse_conditions(require(spec, "initial"), out + ".initial"),
                           parse_conditions(require(spec, "final"), out + ".final")};
    }

    std::vector<std::pair<std::string, std::string>> map_text;
    for (const auto& [name, text] : require(j, "flatness_map").items()) {
      map_text.emplace_back(name, text.get<std::string>());
    }
    cfg.flatness_map = parse_flatness_map(map_text);

    const json& grid = require(j, "grid");
    cfg.grid.t0 = get_or<double>(grid, "t0", 0.0);
    cfg.grid.tf = get_or<double>(grid, "tf", 1.0);
    const long long n = require(grid, "N").get<long long>();
    if (n < 2) throw InputError("grid N must be at least 2");
    cfg.grid.intervals = static_cast<std::size_t>(n);

    if (j.contains("initial_xi")) cfg.initial_xi = j["initial_xi"].get<std::map<std::string, double>>();
    cfg.tolerance = get_or<double>(j, "tolerance", 1e-6);
    cfg.substeps = get_or<int>(j, "substeps", kDefaultSubsteps);
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0x5eed);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  ScenarioResult result;
  json& report = result.report;
  report["scenario"] = cfg.name;
  report["mode"] = cfg.mode == ScenarioMode::Chain ? "chain" : "pv";
  report["classification"] = "NotPV";
  report["chain"] = json::array();
  report["errors"] = json::object();
  report["pass"] = false;
  report["notes"] = cfg.notes;
  report["notes"].push_back("defect <= " + std::to_string(cfg.partition.xi.size()) +
                            " (partition asserted; minimality not verified)");

  std::string stage = "config";
  auto finish = [&](int code) {
    result.exit_code = code;
    report["runtime_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();
    return result;
  };
  auto fail = [&](const char* kind, const std::string& message, int code) {
    report["failure"] = {{"stage", stage}, {"kind", kind}, {"message", message}};
    report["notes"].push_back("stage " + stage + " failed: " + message);
    return finish(code);
  };

  try {
    cfg.validate();
    ProbeOptions probe;
    probe.seed = cfg.seed;

    stage = "structure";
    std::optional<PVForm> pv;
    try {
      pv = extract_pv_form(cfg.system, cfg.partition, probe);
      report["classification"] = to_string(pv->classification());
      report["matrix"] = matrix_to_json(*pv);
    } catch (const StructureError& e) {
      if (cfg.mode == ScenarioMode::PV) throw;
      report["notes"].push_back(std::string("not a linear (PV) extension: ") + e.what());
    }
    std::vector<double> xi0;
    for (const auto& x : cfg.partition.xi) {
      auto it = cfg.initial_xi.find(x);
      xi0.push_back(it == cfg.initial_xi.end() ? 0.0 : it->second);
    }
    ReconstructionPlan plan;
    if (cfg.mode == ScenarioMode::Chain) {
      ExtensionChain chain = check_chain_structure(cfg.system, cfg.partition, probe);
      report["chain"] = chain_to_json(chain);
      plan = ReconstructionPlan::for_chain(std::move(chain), xi0);
    } else {
      plan = ReconstructionPlan::for_pv(*pv, xi0);
    }

    stage = "trajectory";
    PolyTrajectory traj;
    for (const auto& [name, bc] : cfg.boundary) {
      traj.outputs.emplace(name, fit_polynomial_boundary(bc.initial, bc.final, cfg.grid.t0, cfg.grid.tf));
    }

    stage = "synthesis";
    const TrajectoryTable base = synthesize_base(cfg.flatness_map, traj, cfg.grid);

    stage = "reconstruction";
    TrajectoryTable planned = reconstruct(plan, base);
    result.table = planned;

    stage = "simulation";
    std::vector<double> x0;
    for (const auto& s : cfg.system.states) x0.push_back(planned.grid(s).front());
    const TrajectoryTable simulated = integrate_ode(cfg.system, base, x0, cfg.substeps);

    stage = "comparison";
    const ErrorReport cmp = compare(planned, simulated, cfg.system.states, cfg.tolerance);
    for (const auto& c : cmp.columns) {
      report["errors"][c.name] = {{"sup", c.sup}, {"rms", c.rms}};
    }
    report["pass"] = cmp.pass;
    return finish(cmp.pass ? 0 : 1);
  } catch (const StructureError& e) {
    return fail(to_string(e.kind()), e.what(), 1);
  } catch (const InputError& e) {
    return fail("InputError", e.what(), 2);
  } catch (const NumericError& e) {
    return fail("NumericError", e.what(), 3);
  }
}

}  // namespace liouplan
