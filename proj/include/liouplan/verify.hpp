#pragma once

#include <map>
#include <string>
#include <vector>

#include "liouplan/expr.hpp"
#include "liouplan/pv_form.hpp"
#include "liouplan/system_model.hpp"
#include "liouplan/trajectory.hpp"

namespace liouplan {

inline constexpr int kDefaultSubsteps = 10;

/// Classical RK4 of dx/dt = rhs on the grid of `inputs`, with `substeps`
/// steps per grid interval. Every rhs variable that is neither `t` nor a
/// state is read from `inputs`, which must carry midpoint samples for it;
/// between samples the input is the quadratic through t_k, t_k + h/2, t_{k+1}.
/// Returns the state columns at grid points.
TrajectoryTable integrate_rhs(const std::vector<std::string>& states,
                              const std::map<std::string, Expr>& rhs,
                              const TrajectoryTable& inputs, const std::vector<double>& x0,
                              int substeps = kDefaultSubsteps);

/// Validates the model, then integrates it. `x0` follows `sys.states`.
TrajectoryTable integrate_ode(const SystemModel& sys, const TrajectoryTable& inputs,
                              const std::vector<double>& x0, int substeps = kDefaultSubsteps);

/// Direct RK4 integration of d(xi)/dt = A xi, with A evaluated from `base`.
TrajectoryTable integrate_linear(const PVForm& pv, const TrajectoryTable& base,
                                 const std::vector<double>& xi0, int substeps = kDefaultSubsteps);

struct ColumnError {
  std::string name;
  double sup = 0.0;
  double rms = 0.0;
  std::size_t worst_index = 0;
};

struct ErrorReport {
  std::vector<ColumnError> columns;
  double tolerance = 0.0;
  bool pass = true;

  double max_sup() const;
  const ColumnError& column(std::string_view name) const;
};

/// Sup and RMS differences at grid points. Throws InputError if the grids
/// differ or a column is missing.
ErrorReport compare(const TrajectoryTable& a, const TrajectoryTable& b,
                    const std::vector<std::string>& columns, double tol);

/// Checks a plate-ball run (v1, w1, v2, w2, psi) against a run of the rational
/// model (v1, w1, xi, w2, sigma): sigma vs tan(psi/2), xi vs tan(v2/2), the
/// shared states, and the two output pairs (x vs x~, y vs y~).
/// Throws DomainExit if |psi| or |v2| reaches pi - 0.1.
ErrorReport transform_consistency_plateball(const TrajectoryTable& orig,
                                            const TrajectoryTable& rational, double tol);

}  // namespace liouplan
