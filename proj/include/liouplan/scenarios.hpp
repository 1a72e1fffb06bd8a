#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liouplan/expr.hpp"
#include "liouplan/structure.hpp"
#include "liouplan/system_model.hpp"
#include "liouplan/trajectory.hpp"

namespace liouplan {

// ---------------------------------------------------------------------------
// Built-in systems

/// dx1/dt = x2 + x_i^2, dx2/dt = x3, dx3/dt = u, for i in {1, 2, 3}.
SystemModel builtin_academic(int i);

/// Contact kinematics of two surfaces rolling on each other, in geodesic
/// coordinates (v1, w1, v2, w2, psi) with metric factors B(v1, w1) and
/// C(v2, w2). Their v-partials are taken symbolically.
SystemModel builtin_rolling(const Expr& b, const Expr& c);

/// Plate-ball kinematics written out by hand (B = 1, C = cos v2).
SystemModel builtin_plateball();

/// Plate-ball kinematics after sigma = tan(psi/2), xi = tan(v2/2); states
/// (v1, w1, xi, w2, sigma). Rational in the states.
SystemModel builtin_plateball_rational();

struct PlateBallOutputs {
  double x = 0.0;
  double y = 0.0;
  double x_tilde = 0.0;
  double y_tilde = 0.0;
};

/// (x, y) from (v1, w1, v2, w2, psi).
std::pair<double, double> plateball_outputs(const Binding& row);
/// (x~, y~) from (v1, w1, xi, w2, sigma).
std::pair<double, double> plateball_rational_outputs(const Binding& row);
/// Both pairs. `xi` and `sigma` default to tan(v2/2) and tan(psi/2) when the
/// row does not carry them.
PlateBallOutputs liouvillian_outputs_plateball(const Binding& row);

// ---------------------------------------------------------------------------
// JSON

/// Either an inline model {"name", "states", "inputs", "rhs"} or a builtin
/// reference: "academic3", {"builtin": "academic", "i": 3},
/// {"builtin": "rolling", "B": "1", "C": "cos(v2)"}, "plateball",
/// "plateball_rational".
SystemModel system_from_json(const nlohmann::json& j, int jet_order = kDefaultJetOrder);
nlohmann::json system_to_json(const SystemModel& sys);

/// True when `j` refers to a builtin plate-ball model.
bool is_plateball_reference(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Scenarios

enum class ScenarioMode { Chain, PV };

struct OutputBoundary {
  std::vector<BoundaryCondition> initial;
  std::vector<BoundaryCondition> final;
};

struct ScenarioConfig {
  std::string name;
  SystemModel system;
  Partition partition;
  ScenarioMode mode = ScenarioMode::Chain;
  std::map<std::string, OutputBoundary> boundary;
  FlatnessMap flatness_map;
  GridSpec grid;
  std::map<std::string, double> initial_xi;
  double tolerance = 1e-6;
  int substeps = 10;
  std::uint64_t seed = 0x5eed;
  int jet_order = kDefaultJetOrder;
  std::vector<std::string> notes;

  void validate() const;
};

/// Throws InputError on schema violations or unresolved references.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

struct ScenarioResult {
  nlohmann::json report;
  /// Reconstructed table (eta, inputs, outputs, xi); absent if the pipeline failed early.
  std::optional<TrajectoryTable> table;
  /// 0 pass, 1 verification or structure failure, 2 input error, 3 numeric error.
  int exit_code = 0;
};

/// structure -> trajectory -> synthesis -> reconstruction -> simulation -> comparison.
/// Failures do not throw; they are recorded in the report with their stage.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

}  // namespace liouplan
