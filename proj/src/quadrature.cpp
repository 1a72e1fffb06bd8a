#include "liouplan/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "liouplan/errors.hpp"

namespace liouplan {

namespace {

constexpr double kMaxExponent = 700.0;

std::string where(const TrajectoryTable& table, std::size_t k, bool midpoint) {
  std::ostringstream os;
  os.precision(17);
  os << (midpoint ? "midpoint " : "row ") << k << " (t = "
     << (midpoint ? table.mid_time(k) : table.time(k)) << ")";
  return os.str();
}

double eval_row(const Expr& e, const Binding& row, const TrajectoryTable& table, std::size_t k,
                bool midpoint) {
  try {
    return evaluate(e, row);
  } catch (const DomainError& err) {
    throw DomainError(err.node(), err.value(), where(table, k, midpoint));
  } catch (const UnboundVariable& err) {
    throw InputError("'" + err.name() + "' is not available at " + where(table, k, midpoint) +
                     (midpoint ? " (missing midpoint samples?)" : ""));
  }
}

void guard_exponent(double c, const std::string& var, double t) {
  if (std::fabs(c) > kMaxExponent) {
    std::ostringstream os;
    os.precision(17);
    os << "exponent " << c << " for '" << var << "' at t = " << t << " exceeds " << kMaxExponent;
    throw ExpOverflow(os.str());
  }
}

}  // namespace

CumulativeIntegral cumulative_integral(std::span<const double> f_grid,
                                       std::span<const double> f_mid, double h) {
  if (f_grid.empty()) throw InputError("cumulative integral needs at least one grid sample");
  const std::size_t n = f_grid.size() - 1;
  if (f_mid.size() != n) throw InputError("cumulative integral needs one midpoint per interval");
  for (std::size_t k = 0; k <= n; ++k) {
    if (!std::isfinite(f_grid[k])) throw NonFiniteSample(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(f_mid[k])) throw NonFiniteSample(n + 1 + k);
  }

  CumulativeIntegral out{std::vector<double>(n + 1, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const double a = f_grid[k];
    const double m = f_mid[k];
    const double b = f_grid[k + 1];
    out.mid[k] = out.grid[k] + h / 24.0 * (5.0 * a + 8.0 * m - b);
    out.grid[k + 1] = out.grid[k] + h / 6.0 * (a + 4.0 * m + b);
  }
  return out;
}

SampledColumn sample_expression(const Expr& e, const TrajectoryTable& table) {
  const std::size_t n = table.intervals();
  SampledColumn out{std::vector<double>(n + 1), std::vector<double>(n)};
  for (std::size_t k = 0; k <= n; ++k) out.grid[k] = eval_row(e, table.row(k), table, k, false);
  for (std::size_t k = 0; k < n; ++k) out.mid[k] = eval_row(e, table.mid_row(k), table, k, true);
  return out;
}

SampledColumn integral_extension(const Expr& alpha, const TrajectoryTable& base, double xi0) {
  const SampledColumn f = sample_expression(alpha, base);
  const CumulativeIntegral g = cumulative_integral(f.grid, f.mid, base.step());
  SampledColumn out{g.grid, g.mid};
  for (auto& v : out.grid) v += xi0;
  for (auto& v : out.mid) v += xi0;
  return out;
}

SampledColumn exponential_extension(const Expr& alpha, const TrajectoryTable& base, double xi0) {
  const SampledColumn f = sample_expression(alpha, base);
  const CumulativeIntegral g = cumulative_integral(f.grid, f.mid, base.step());
  SampledColumn out{std::vector<double>(g.grid.size()), std::vector<double>(g.mid.size())};
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    guard_exponent(g.grid[k], "exponential extension", base.time(k));
    out.grid[k] = xi0 * std::exp(g.grid[k]);
  }
  for (std::size_t k = 0; k < g.mid.size(); ++k) {
    guard_exponent(g.mid[k], "exponential extension", base.mid_time(k));
    out.mid[k] = xi0 * std::exp(g.mid[k]);
  }
  return out;
}

TrajectoryTable reconstruct_chain(const ExtensionChain& chain, const TrajectoryTable& base,
                                  const std::vector<double>& xi0) {
  if (xi0.size() != chain.steps.size()) {
    throw InputError("chain has " + std::to_string(chain.steps.size()) + " steps but " +
                     std::to_string(xi0.size()) + " initial values were given");
  }
  TrajectoryTable table = base;
  for (std::size_t j = 0; j < chain.steps.size(); ++j) {
    const ExtensionStep& step = chain.steps[j];
    SampledColumn col;
    try {
      col = step.kind == ExtensionKind::Integral ? integral_extension(step.alpha, table, xi0[j])
                                                 : exponential_extension(step.alpha, table, xi0[j]);
    } catch (const DomainError& err) {
      throw DomainError(err.node(), err.value(), "extension step '" + step.var + "'");
    } catch (const NumericError& err) {
      throw NumericError("extension step '" + step.var + "': " + err.what());
    } catch (const InputError& err) {
      throw InputError("extension step '" + step.var + "': " + err.what());
    }
    table.set_column(step.var, std::move(col.grid), std::move(col.mid));
  }
  return table;
}

ReconstructionPlan ReconstructionPlan::for_chain(ExtensionChain chain, std::vector<double> xi0) {
  ReconstructionPlan plan;
  plan.mode = ReconstructionMode::Chain;
  plan.chain = std::move(chain);
  plan.xi0 = std::move(xi0);
  return plan;
}

ReconstructionPlan ReconstructionPlan::for_pv(PVForm pv, std::vector<double> xi0) {
  ReconstructionPlan plan;
  switch (pv.classification()) {
    case MatrixClass::UnitLowerTriangular: plan.mode = ReconstructionMode::UnitTriangular; break;
    case MatrixClass::LowerTriangular: plan.mode = ReconstructionMode::Triangular; break;
    case MatrixClass::General:
      throw InputError("PV matrix is not lower triangular; quadrature reconstruction does not apply");
  }
  plan.pv = std::move(pv);
  plan.xi0 = std::move(xi0);
  return plan;
}

TrajectoryTable reconstruct_pv(const ReconstructionPlan& plan, const TrajectoryTable& base) {
  if (plan.mode == ReconstructionMode::Chain || !plan.pv) {
    throw InputError("reconstruct_pv needs a PV plan");
  }
  const PVForm& pv = *plan.pv;
  const std::size_t d = pv.size();
  if (plan.xi0.size() != d) throw InputError("PV plan initial values do not match the matrix size");

  const MatrixClass cls = pv.classification();
  const bool ok = plan.mode == ReconstructionMode::UnitTriangular
                      ? cls == MatrixClass::UnitLowerTriangular
                      : cls != MatrixClass::General;
  if (!ok) {
    throw InputError(std::string("classification mismatch: matrix is ") + to_string(cls));
  }

  const std::size_t n = base.intervals();
  const double h = base.step();
  TrajectoryTable table = base;
  for (std::size_t i = 0; i < d; ++i) {
    const std::string& var = pv.xi_names()[i];

    // Integrating exponent c_i.
    CumulativeIntegral c;
    if (plan.mode == ReconstructionMode::UnitTriangular) {
      c.grid.resize(n + 1);
      c.mid.resize(n);
      for (std::size_t k = 0; k <= n; ++k) c.grid[k] = table.time(k) - table.t0();
      for (std::size_t k = 0; k < n; ++k) c.mid[k] = table.mid_time(k) - table.t0();
    } else {
      const SampledColumn diag = sample_expression(pv.entry(i, i), table);
      c = cumulative_integral(diag.grid, diag.mid, h);
    }
    for (std::size_t k = 0; k <= n; ++k) guard_exponent(c.grid[k], var, table.time(k));
    for (std::size_t k = 0; k < n; ++k) guard_exponent(c.mid[k], var, table.mid_time(k));

    // Forcing from earlier rows, scaled by e^{-c_i}.
    SampledColumn forcing{std::vector<double>(n + 1, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t j = 0; j < i; ++j) {
      if (pv.entry(i, j).is_constant(0.0)) continue;
      const SampledColumn a = sample_expression(pv.entry(i, j), table);
      const auto& xg = table.grid(pv.xi_names()[j]);
      const auto& xm = table.midpoints(pv.xi_names()[j]);
      for (std::size_t k = 0; k <= n; ++k) forcing.grid[k] += a.grid[k] * xg[k];
      for (std::size_t k = 0; k < n; ++k) forcing.mid[k] += a.mid[k] * xm[k];
    }
    for (std::size_t k = 0; k <= n; ++k) forcing.grid[k] *= std::exp(-c.grid[k]);
    for (std::size_t k = 0; k < n; ++k) forcing.mid[k] *= std::exp(-c.mid[k]);
    const CumulativeIntegral g = cumulative_integral(forcing.grid, forcing.mid, h);

    SampledColumn xi{std::vector<double>(n + 1), std::vector<double>(n)};
    for (std::size_t k = 0; k <= n; ++k) xi.grid[k] = std::exp(c.grid[k]) * (plan.xi0[i] + g.grid[k]);
    for (std::size_t k = 0; k < n; ++k) xi.mid[k] = std::exp(c.mid[k]) * (plan.xi0[i] + g.mid[k]);
    table.set_column(var, std::move(xi.grid), std::move(xi.mid));
  }
  return table;
}

TrajectoryTable reconstruct(const ReconstructionPlan& plan, const TrajectoryTable& base) {
  if (plan.mode == ReconstructionMode::Chain) return reconstruct_chain(plan.chain, base, plan.xi0);
  return reconstruct_pv(plan, base);
}

}  // namespace liouplan
