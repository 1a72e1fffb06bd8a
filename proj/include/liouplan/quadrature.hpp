#pragma once

#include <span>
#include <string>
#include <vector>

#include "liouplan/expr.hpp"
#include "liouplan/pv_form.hpp"
#include "liouplan/structure.hpp"
#include "liouplan/trajectory.hpp"

namespace liouplan {

/// A quantity sampled at grid points and at interval midpoints.
struct SampledColumn {
  std::vector<double> grid;
  std::vector<double> mid;
};

/// Running integral G_k of f from t0 to t_k; `mid` holds G at t_k + h/2.
struct CumulativeIntegral {
  std::vector<double> grid;
  std::vector<double> mid;
};

/// Per-interval Simpson: G_{k+1} = G_k + h/6 (f_k + 4 f_{k+1/2} + f_{k+1}).
/// Half-step values integrate the same interval quadratic over [t_k, t_k + h/2].
/// Throws NonFiniteSample (index into the grid, or N+1+k for midpoint k).
CumulativeIntegral cumulative_integral(std::span<const double> f_grid,
                                       std::span<const double> f_mid, double h);

/// Evaluates `e` on every grid and midpoint row of `table`.
SampledColumn sample_expression(const Expr& e, const TrajectoryTable& table);

/// xi(t_k) = xi0 + integral of alpha.
SampledColumn integral_extension(const Expr& alpha, const TrajectoryTable& base, double xi0);

/// xi(t_k) = xi0 * exp(integral of alpha). Throws ExpOverflow if the exponent exceeds 700.
SampledColumn exponential_extension(const Expr& alpha, const TrajectoryTable& base, double xi0);

/// Applies the steps in order, appending each xi column (grid and midpoints).
TrajectoryTable reconstruct_chain(const ExtensionChain& chain, const TrajectoryTable& base,
                                  const std::vector<double>& xi0);

enum class ReconstructionMode {
  Chain,
  UnitTriangular,  // unit lower-triangular A: every exponent is t - t0
  Triangular,      // lower-triangular A: exponents are integrals of the diagonal
};

struct ReconstructionPlan {
  ReconstructionMode mode = ReconstructionMode::Chain;
  ExtensionChain chain;
  std::optional<PVForm> pv;
  std::vector<double> xi0;

  static ReconstructionPlan for_chain(ExtensionChain chain, std::vector<double> xi0);
  /// Chooses UnitTriangular or Triangular from the classification; throws
  /// InputError for a General matrix.
  static ReconstructionPlan for_pv(PVForm pv, std::vector<double> xi0);
};

/// Row-by-row variation of constants for d(xi)/dt = A xi with A lower triangular:
/// c_i = integral of a_ii, xi_i = e^{c_i} (xi_i(t0) + integral of (sum_{j<i} a_ij xi_j) e^{-c_i}).
TrajectoryTable reconstruct_pv(const ReconstructionPlan& plan, const TrajectoryTable& base);

/// Dispatches on the plan mode.
TrajectoryTable reconstruct(const ReconstructionPlan& plan, const TrajectoryTable& base);

}  // namespace liouplan
