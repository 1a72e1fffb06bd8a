#include "liouplan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "liouplan/errors.hpp"
#include "liouplan/scenarios.hpp"

namespace liouplan {

namespace {

// Quadratic through (0, a), (1/2, m), (1, b) at s in [0, 1].
double quadratic(double a, double m, double b, double s) {
  return 2.0 * (s - 0.5) * (s - 1.0) * a - 4.0 * s * (s - 1.0) * m + 2.0 * s * (s - 0.5) * b;
}

struct InputTrack {
  double* slot;
  const std::vector<double>* grid;
  const std::vector<double>* mid;
};

}  // namespace

TrajectoryTable integrate_rhs(const std::vector<std::string>& states,
                              const std::map<std::string, Expr>& rhs,
                              const TrajectoryTable& inputs, const std::vector<double>& x0,
                              int substeps) {
  if (substeps < 1) throw InputError("substeps must be at least 1");
  const std::size_t n = states.size();
  if (x0.size() != n) {
    throw InputError("initial state has " + std::to_string(x0.size()) + " values, expected " +
                     std::to_string(n));
  }
  std::vector<const Expr*> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = rhs.find(states[i]);
    if (it == rhs.end()) throw InputError("no rhs for state '" + states[i] + "'");
    f[i] = &it->second;
  }

  Binding env;
  double* t_slot = &env["t"];
  std::vector<double*> state_slots(n);
  for (std::size_t i = 0; i < n; ++i) state_slots[i] = &env[states[i]];

  std::set<std::string> needed;
  for (const auto* e : f) {
    for (const auto& v : variables(*e)) {
      if (v != "t" && std::find(states.begin(), states.end(), v) == states.end()) needed.insert(v);
    }
  }
  std::vector<InputTrack> tracks;
  for (const auto& v : needed) {
    if (!inputs.has_column(v)) throw InputError("input table has no column '" + v + "'");
    if (!inputs.has_midpoints(v)) {
      throw InputError("input column '" + v + "' has no midpoint samples");
    }
    tracks.push_back({&env[v], &inputs.grid(v), &inputs.midpoints(v)});
  }

  const std::size_t intervals = inputs.intervals();
  const double h = inputs.step();
  const double dt = h / substeps;
  std::vector<std::vector<double>> out(n, std::vector<double>(intervals + 1));
  std::vector<double> x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) throw NonFiniteState(inputs.t0());
    out[i][0] = x[i];
  }

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::size_t k = 0;
  auto derivative = [&](double s, const std::vector<double>& state, std::vector<double>& dx) {
    *t_slot = inputs.time(k) + s * h;
    for (std::size_t i = 0; i < n; ++i) *state_slots[i] = state[i];
    for (const auto& tr : tracks) {
      *tr.slot = quadratic((*tr.grid)[k], (*tr.mid)[k], (*tr.grid)[k + 1], s);
    }
    for (std::size_t i = 0; i < n; ++i) {
      try {
        dx[i] = evaluate(*f[i], env);
      } catch (const DomainError& err) {
        std::ostringstream os;
        os.precision(17);
        os << "rhs of " << states[i] << " at t = " << *t_slot << ", state:";
        for (std::size_t j = 0; j < n; ++j) os << ' ' << states[j] << '=' << state[j];
        throw DomainError(err.node(), err.value(), os.str());
      }
    }
  };

  for (k = 0; k < intervals; ++k) {
    for (int j = 0; j < substeps; ++j) {
      const double s0 = static_cast<double>(j) / substeps;
      const double sh = (j + 0.5) / substeps;
      const double s1 = static_cast<double>(j + 1) / substeps;
      derivative(s0, x, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
      derivative(sh, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
      derivative(sh, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
      derivative(s1, tmp, k4);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(x[i])) throw NonFiniteState(inputs.time(k) + s1 * h);
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i][k + 1] = x[i];
  }

  TrajectoryTable table(inputs.t0(), inputs.tf(), intervals);
  for (std::size_t i = 0; i < n; ++i) table.set_column(states[i], std::move(out[i]));
  return table;
}

TrajectoryTable integrate_ode(const SystemModel& sys, const TrajectoryTable& inputs,
                              const std::vector<double>& x0, int substeps) {
  sys.validate();
  return integrate_rhs(sys.states, sys.rhs, inputs, x0, substeps);
}

TrajectoryTable integrate_linear(const PVForm& pv, const TrajectoryTable& base,
                                 const std::vector<double>& xi0, int substeps) {
  std::map<std::string, Expr> rhs;
  const std::size_t d = pv.size();
  for (std::size_t i = 0; i < d; ++i) {
    Expr row = Expr::constant(0.0);
    for (std::size_t j = 0; j < d; ++j) {
      row = row + pv.entry(i, j) * Expr::variable(pv.xi_names()[j]);
    }
    rhs.emplace(pv.xi_names()[i], simplify(row));
  }
  return integrate_rhs(pv.xi_names(), rhs, base, xi0, substeps);
}

double ErrorReport::max_sup() const {
  double m = 0.0;
  for (const auto& c : columns) m = std::max(m, c.sup);
  return m;
}

const ColumnError& ErrorReport::column(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return c;
  }
  throw InputError("error report has no column '" + std::string(name) + "'");
}

ErrorReport compare(const TrajectoryTable& a, const TrajectoryTable& b,
                    const std::vector<std::string>& columns, double tol) {
  if (!a.same_grid(b)) throw InputError("cannot compare tables on different grids");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  ErrorReport report;
  report.tolerance = tol;
  for (const auto& name : columns) {
    const auto& x = a.grid(name);
    const auto& y = b.grid(name);
    ColumnError ce{name, 0.0, 0.0, 0};
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double diff = std::fabs(x[k] - y[k]);
      sum_sq += diff * diff;
      if (diff > ce.sup) {
        ce.sup = diff;
        ce.worst_index = k;
      }
    }
    ce.rms = std::sqrt(sum_sq / static_cast<double>(x.size()));
    report.columns.push_back(ce);
  }
  report.pass = report.max_sup() <= tol;
  return report;
}

ErrorReport transform_consistency_plateball(const TrajectoryTable& orig,
                                            const TrajectoryTable& rational, double tol) {
  if (!orig.same_grid(rational)) throw InputError("cannot compare tables on different grids");
  const double limit = std::numbers::pi - 0.1;
  const auto& psi = orig.grid("psi");
  const auto& v2 = orig.grid("v2");
  const std::size_t np = orig.points();
  for (std::size_t k = 0; k < np; ++k) {
    if (std::fabs(psi[k]) >= limit) throw DomainExit(orig.time(k), "|psi| reached pi - 0.1");
    if (std::fabs(v2[k]) >= limit) throw DomainExit(orig.time(k), "|v2| reached pi - 0.1");
  }

  TrajectoryTable lhs(orig.t0(), orig.tf(), orig.intervals());
  TrajectoryTable rhs(orig.t0(), orig.tf(), orig.intervals());
  std::vector<double> sigma_a(np), xi_a(np), x(np), y(np), x_tilde(np), y_tilde(np);
  for (std::size_t k = 0; k < np; ++k) {
    const auto o = plateball_outputs(orig.row(k));
    const auto r = plateball_rational_outputs(rational.row(k));
    sigma_a[k] = std::tan(psi[k] / 2.0);
    xi_a[k] = std::tan(v2[k] / 2.0);
    x[k] = o.first;
    y[k] = o.second;
    x_tilde[k] = r.first;
    y_tilde[k] = r.second;
  }
  for (const char* shared : {"v1", "w1", "w2"}) {
    lhs.set_column(shared, orig.grid(shared));
    rhs.set_column(shared, rational.grid(shared));
  }
  lhs.set_column("sigma", std::move(sigma_a));
  rhs.set_column("sigma", rational.grid("sigma"));
  lhs.set_column("xi", std::move(xi_a));
  rhs.set_column("xi", rational.grid("xi"));
  lhs.set_column("x", std::move(x));
  rhs.set_column("x", std::move(x_tilde));
  lhs.set_column("y", std::move(y));
  rhs.set_column("y", std::move(y_tilde));
  return compare(lhs, rhs, {"sigma", "xi", "v1", "w1", "w2", "x", "y"}, tol);
}

}  // namespace liouplan
