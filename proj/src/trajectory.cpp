#include "liouplan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "liouplan/errors.hpp"

namespace liouplan {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kFitResidual = 1e-10;

// p! / (p - k)!
double falling_factorial(int p, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(p - i);
  return r;
}

void check_conditions(const std::vector<BoundaryCondition>& bcs, const char* which) {
  std::set<int> orders;
  for (const auto& bc : bcs) {
    if (bc.order < 0) throw InputError(std::string("negative derivative order at ") + which);
    if (!std::isfinite(bc.value)) throw InputError(std::string("non-finite boundary value at ") + which);
    if (!orders.insert(bc.order).second) {
      throw InputError("derivative order " + std::to_string(bc.order) + " given twice at " + which);
    }
  }
}

// Longest run of orders 0, 1, ..., r present, minus one.
int continuity_order(const std::vector<BoundaryCondition>& bcs) {
  std::set<int> orders;
  for (const auto& bc : bcs) orders.insert(bc.order);
  int r = -1;
  while (orders.count(r + 1)) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrajectoryTable

TrajectoryTable::TrajectoryTable(double t0, double tf, std::size_t intervals)
    : t0_(t0), tf_(tf), n_(intervals), h_(0.0) {
  if (!(std::isfinite(t0) && std::isfinite(tf) && t0 < tf)) {
    throw InputError("grid needs finite t0 < tf");
  }
  if (intervals < 1) throw InputError("grid needs at least one interval");
  h_ = (tf - t0) / static_cast<double>(intervals);
}

void TrajectoryTable::set_column(const std::string& name, std::vector<double> grid,
                                 std::vector<double> mid) {
  if (name == "t") throw InputError("'t' is reserved for the time column");
  if (grid.size() != points()) {
    throw InputError("column '" + name + "' has " + std::to_string(grid.size()) +
                     " grid values, expected " + std::to_string(points()));
  }
  if (!mid.empty() && mid.size() != n_) {
    throw InputError("column '" + name + "' has " + std::to_string(mid.size()) +
                     " midpoint values, expected " + std::to_string(n_));
  }
  auto [it, inserted] = columns_.try_emplace(name);
  if (inserted) order_.push_back(name);
  it->second = Column{std::move(grid), std::move(mid)};
}

bool TrajectoryTable::has_column(std::string_view name) const {
  return columns_.find(name) != columns_.end();
}

bool TrajectoryTable::has_midpoints(std::string_view name) const {
  auto it = columns_.find(name);
  return it != columns_.end() && !it->second.mid.empty();
}

const TrajectoryTable::Column& TrajectoryTable::column(std::string_view name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw InputError("table has no column '" + std::string(name) + "'");
  return it->second;
}

const std::vector<double>& TrajectoryTable::grid(std::string_view name) const {
  return column(name).grid;
}

const std::vector<double>& TrajectoryTable::midpoints(std::string_view name) const {
  const Column& c = column(name);
  if (c.mid.empty()) throw InputError("column '" + std::string(name) + "' has no midpoint samples");
  return c.mid;
}

Binding TrajectoryTable::row(std::size_t k) const {
  Binding b;
  b["t"] = time(k);
  for (const auto& [name, col] : columns_) b[name] = col.grid.at(k);
  return b;
}

Binding TrajectoryTable::mid_row(std::size_t k) const {
  Binding b;
  b["t"] = mid_time(k);
  for (const auto& [name, col] : columns_) {
    if (!col.mid.empty()) b[name] = col.mid.at(k);
  }
  return b;
}

bool TrajectoryTable::same_grid(const TrajectoryTable& other) const noexcept {
  return t0_ == other.t0_ && tf_ == other.tf_ && n_ == other.n_;
}

// ---------------------------------------------------------------------------
// Polynomials

Polynomial::Polynomial(double origin, std::vector<double> coefficients)
    : origin_(origin), c_(std::move(coefficients)) {
  if (c_.empty()) c_.push_back(0.0);
}

double Polynomial::eval(double t, int derivative) const {
  const int deg = degree();
  if (derivative > deg) return 0.0;
  const double s = t - origin_;
  double acc = 0.0;
  for (int p = deg; p >= derivative; --p) {
    acc = acc * s + c_[static_cast<std::size_t>(p)] * falling_factorial(p, derivative);
  }
  return acc;
}

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints,
                                         std::vector<Polynomial> segments, int smoothness)
    : breaks_(std::move(breakpoints)), segments_(std::move(segments)), smoothness_(smoothness) {
  if (breaks_.size() < 2 || segments_.size() + 1 != breaks_.size()) {
    throw InputError("piecewise polynomial needs one segment per breakpoint interval");
  }
  if (!std::is_sorted(breaks_.begin(), breaks_.end()) ||
      std::adjacent_find(breaks_.begin(), breaks_.end()) != breaks_.end()) {
    throw InputError("breakpoints must be strictly increasing");
  }
}

double PiecewisePolynomial::eval(double t, int derivative) const {
  const double span = tf() - t0();
  const double slack = 1e-12 * span;
  if (t < t0() - slack || t > tf() + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "t = " << t << " outside trajectory horizon [" << t0() << ", " << tf() << "]";
    throw InputError(os.str());
  }
  if (derivative < 0) throw InputError("negative derivative order");
  auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, t);
  const auto seg = static_cast<std::size_t>(it - (breaks_.begin() + 1));
  return segments_[seg].eval(t, derivative);
}

PiecewisePolynomial fit_polynomial_boundary(const std::vector<BoundaryCondition>& bc0,
                                            const std::vector<BoundaryCondition>& bcf, double t0,
                                            double tf) {
  if (!(std::isfinite(t0) && std::isfinite(tf) && t0 < tf)) {
    throw InputError("boundary fit needs t0 < tf");
  }
  check_conditions(bc0, "t0");
  check_conditions(bcf, "tf");
  const int n = static_cast<int>(bc0.size() + bcf.size());
  if (n == 0) throw InputError("boundary fit needs at least one condition");

  // Solve in s = (t - t0) / T to keep the system well scaled.
  const double span = tf - t0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  int row = 0;
  for (const auto* side : {&bc0, &bcf}) {
    const double s = side == &bc0 ? 0.0 : 1.0;
    for (const auto& bc : *side) {
      for (int p = bc.order; p < n; ++p) {
        m(row, p) = falling_factorial(p, bc.order) * std::pow(s, p - bc.order);
      }
      rhs(row) = bc.value * std::pow(span, bc.order);
      ++row;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > kMaxCondition) {
    throw SingularFit("boundary-condition system is singular (condition estimate " +
                      std::to_string(smallest > 0.0 ? sv(0) / smallest : INFINITY) + ")");
  }
  const auto lu = m.fullPivLu();
  Eigen::VectorXd cs = lu.solve(rhs);
  std::vector<double> coeffs(static_cast<std::size_t>(n));
  auto to_t = [&] {
    for (int p = 0; p < n; ++p) coeffs[static_cast<std::size_t>(p)] = cs(p) / std::pow(span, p);
    return Polynomial(t0, coeffs);
  };
  Polynomial poly = to_t();

  // Refine against the residual measured in t, where the conditions are stated.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd r(n);
    row = 0;
    for (const auto* side : {&bc0, &bcf}) {
      const double t = side == &bc0 ? t0 : tf;
      for (const auto& bc : *side) {
        r(row++) = (bc.value - poly.eval(t, bc.order)) * std::pow(span, bc.order);
      }
    }
    cs += lu.solve(r);
    poly = to_t();
  }

  for (const auto* side : {&bc0, &bcf}) {
    const double t = side == &bc0 ? t0 : tf;
    for (const auto& bc : *side) {
      const double err = std::fabs(poly.eval(t, bc.order) - bc.value);
      if (err > kFitResidual * std::max(1.0, std::fabs(bc.value))) {
        throw SingularFit("boundary fit residual " + std::to_string(err) + " exceeds tolerance");
      }
    }
  }
  return PiecewisePolynomial({t0, tf}, {std::move(poly)}, PiecewisePolynomial::kAnalytic);
}

PiecewisePolynomial fit_piecewise(const std::vector<Knot>& knots) {
  if (knots.size() < 2) throw InputError("piecewise fit needs at least two knots");
  std::vector<double> breaks;
  std::vector<Polynomial> segments;
  int smoothness = PiecewisePolynomial::kAnalytic;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    auto piece = fit_polynomial_boundary(knots[i].conditions, knots[i + 1].conditions, knots[i].t,
                                         knots[i + 1].t);
    segments.push_back(piece.segments().front());
    breaks.push_back(knots[i].t);
    if (i > 0) smoothness = std::min(smoothness, continuity_order(knots[i].conditions));
  }
  breaks.push_back(knots.back().t);
  return PiecewisePolynomial(std::move(breaks), std::move(segments), smoothness);
}

// ---------------------------------------------------------------------------
// Flat-output trajectories

double PolyTrajectory::t0() const {
  if (outputs.empty()) throw InputError("trajectory has no outputs");
  double t = -INFINITY;
  for (const auto& [_, p] : outputs) t = std::max(t, p.t0());
  return t;
}

double PolyTrajectory::tf() const {
  if (outputs.empty()) throw InputError("trajectory has no outputs");
  double t = INFINITY;
  for (const auto& [_, p] : outputs) t = std::min(t, p.tf());
  return t;
}

int PolyTrajectory::smoothness() const {
  int r = PiecewisePolynomial::kAnalytic;
  for (const auto& [_, p] : outputs) r = std::min(r, p.smoothness());
  return r;
}

Binding eval_jet(const PolyTrajectory& traj, double t, int max_order) {
  if (max_order < 0) throw InputError("negative jet order");
  if (max_order > traj.smoothness()) {
    throw InputError("jet order " + std::to_string(max_order) + " exceeds trajectory smoothness " +
                     std::to_string(traj.smoothness()));
  }
  Binding jet;
  for (const auto& [name, poly] : traj.outputs) {
    for (int k = 0; k <= max_order; ++k) jet[with_primes(name, k)] = poly.eval(t, k);
  }
  return jet;
}

FlatnessMap parse_flatness_map(const std::vector<std::pair<std::string, std::string>>& text) {
  FlatnessMap map;
  for (const auto& [name, expr] : text) {
    try {
      map.emplace_back(name, parse_expression(expr));
    } catch (const ParseError& e) {
      throw InputError("flatness map entry '" + name + "': " + e.what());
    }
  }
  return map;
}

int max_prime_order(const FlatnessMap& map) {
  int order = 0;
  for (const auto& [_, e] : map) {
    for (const auto& v : variables(e)) order = std::max(order, split_primes(v).second);
  }
  return order;
}

TrajectoryTable synthesize_base(const FlatnessMap& map, const PolyTrajectory& traj,
                                const GridSpec& grid) {
  if (map.empty()) throw InputError("flatness map has no columns");
  if (traj.outputs.empty()) throw InputError("flat-output trajectory has no outputs");
  const int order = max_prime_order(map);
  if (order > traj.smoothness()) {
    throw InputError("flatness map needs derivative order " + std::to_string(order) +
                     " but the trajectory is only C^" + std::to_string(traj.smoothness()));
  }
  const double slack = 1e-12 * (traj.tf() - traj.t0());
  if (grid.t0 < traj.t0() - slack || grid.tf > traj.tf() + slack) {
    throw InputError("grid extends beyond the flat-output trajectory horizon");
  }

  std::set<std::string> allowed{"t"};
  for (const auto& [name, _] : traj.outputs) {
    for (int k = 0; k <= order; ++k) allowed.insert(with_primes(name, k));
  }
  std::set<std::string> seen;
  for (const auto& [name, e] : map) {
    if (allowed.count(name)) throw InputError("flatness map key '" + name + "' collides with an output");
    if (!seen.insert(name).second) throw InputError("flatness map key '" + name + "' repeated");
    for (const auto& v : variables(e)) {
      if (!allowed.count(v)) {
        throw InputError("flatness map entry '" + name + "' mentions '" + v +
                         "', which is not t or a flat-output derivative");
      }
    }
  }

  TrajectoryTable table(grid.t0, grid.tf, grid.intervals);
  const std::size_t n = table.intervals();
  std::vector<Binding> grid_jets(n + 1);
  std::vector<Binding> mid_jets(n);
  for (std::size_t k = 0; k <= n; ++k) {
    grid_jets[k] = eval_jet(traj, table.time(k), order);
    grid_jets[k]["t"] = table.time(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    mid_jets[k] = eval_jet(traj, table.mid_time(k), order);
    mid_jets[k]["t"] = table.mid_time(k);
  }

  for (const auto& [name, _] : traj.outputs) {
    for (int d = 0; d <= order; ++d) {
      const std::string col = with_primes(name, d);
      std::vector<double> g(n + 1);
      std::vector<double> m(n);
      for (std::size_t k = 0; k <= n; ++k) g[k] = grid_jets[k].at(col);
      for (std::size_t k = 0; k < n; ++k) m[k] = mid_jets[k].at(col);
      table.set_column(col, std::move(g), std::move(m));
    }
  }

  auto eval_at = [](const Expr& e, const Binding& b, const std::string& col) {
    try {
      return evaluate(e, b);
    } catch (const DomainError& err) {
      std::ostringstream os;
      os.precision(17);
      os << "column " << col << " at t = " << b.at("t");
      throw DomainError(err.node(), err.value(), os.str());
    }
  };
  for (const auto& [name, e] : map) {
    std::vector<double> g(n + 1);
    std::vector<double> m(n);
    for (std::size_t k = 0; k <= n; ++k) g[k] = eval_at(e, grid_jets[k], name);
    for (std::size_t k = 0; k < n; ++k) m[k] = eval_at(e, mid_jets[k], name);
    table.set_column(name, std::move(g), std::move(m));
  }
  return table;
}

}  // namespace liouplan
