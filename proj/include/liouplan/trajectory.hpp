#pragma once

#include <climits>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "liouplan/expr.hpp"

namespace liouplan {

/// Samples on the uniform grid t_k = t0 + k h, k = 0..N, with optional
/// midpoint samples at t_k + h/2 (k = 0..N-1) per column.
class TrajectoryTable {
 public:
  TrajectoryTable(double t0, double tf, std::size_t intervals);

  double t0() const noexcept { return t0_; }
  double tf() const noexcept { return tf_; }
  std::size_t intervals() const noexcept { return n_; }
  std::size_t points() const noexcept { return n_ + 1; }
  double step() const noexcept { return h_; }
  double time(std::size_t k) const noexcept { return k == n_ ? tf_ : t0_ + static_cast<double>(k) * h_; }
  double mid_time(std::size_t k) const noexcept { return t0_ + (static_cast<double>(k) + 0.5) * h_; }

  /// Adds or replaces a column. `mid` is empty or holds N values.
  void set_column(const std::string& name, std::vector<double> grid, std::vector<double> mid = {});
  bool has_column(std::string_view name) const;
  bool has_midpoints(std::string_view name) const;
  const std::vector<double>& grid(std::string_view name) const;
  const std::vector<double>& midpoints(std::string_view name) const;
  /// Column names in insertion order (excluding `t`).
  const std::vector<std::string>& column_names() const noexcept { return order_; }

  /// `t` plus every column at grid point k.
  Binding row(std::size_t k) const;
  /// `t` plus every column that has midpoints, at t_k + h/2.
  Binding mid_row(std::size_t k) const;

  /// Same t0, tf, and N, so every time value is bit-identical.
  bool same_grid(const TrajectoryTable& other) const noexcept;

 private:
  struct Column {
    std::vector<double> grid;
    std::vector<double> mid;
  };

  const Column& column(std::string_view name) const;

  double t0_;
  double tf_;
  std::size_t n_;
  double h_;
  std::vector<std::string> order_;
  std::map<std::string, Column, std::less<>> columns_;
};

struct BoundaryCondition {
  int order = 0;
  double value = 0.0;
};

/// Polynomial in (t - origin).
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(double origin, std::vector<double> coefficients);

  double origin() const noexcept { return origin_; }
  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  /// k-th derivative at t.
  double eval(double t, int derivative = 0) const;

 private:
  double origin_ = 0.0;
  std::vector<double> c_;
};

/// One flat-output component over [t0, tf], piecewise polynomial.
class PiecewisePolynomial {
 public:
  static constexpr int kAnalytic = INT_MAX;

  PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial> segments,
                      int smoothness);

  double t0() const noexcept { return breaks_.front(); }
  double tf() const noexcept { return breaks_.back(); }
  /// Highest derivative order that is continuous across breakpoints.
  int smoothness() const noexcept { return smoothness_; }
  const std::vector<Polynomial>& segments() const noexcept { return segments_; }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }

  double eval(double t, int derivative = 0) const;

 private:
  std::vector<double> breaks_;
  std::vector<Polynomial> segments_;
  int smoothness_;
};

/// Minimal-degree polynomial meeting every boundary condition exactly.
/// Throws InputError on bad arguments and SingularFit on an ill-posed system.
PiecewisePolynomial fit_polynomial_boundary(const std::vector<BoundaryCondition>& bc0,
                                            const std::vector<BoundaryCondition>& bcf, double t0,
                                            double tf);

struct Knot {
  double t = 0.0;
  std::vector<BoundaryCondition> conditions;
};

/// Segments fitted independently between consecutive knots; shared knot
/// conditions give continuity up to the longest run of orders 0..r present
/// at every interior knot.
PiecewisePolynomial fit_piecewise(const std::vector<Knot>& knots);

/// Flat-output trajectory: one piecewise polynomial per output name.
struct PolyTrajectory {
  std::map<std::string, PiecewisePolynomial> outputs;

  double t0() const;
  double tf() const;
  int smoothness() const;
};

/// {y: y(t), y': dy/dt(t), ...} for every output, up to `max_order`.
Binding eval_jet(const PolyTrajectory& traj, double t, int max_order);

/// Expressions for eta states and inputs in terms of t and the flat-output jet.
using FlatnessMap = std::vector<std::pair<std::string, Expr>>;

FlatnessMap parse_flatness_map(const std::vector<std::pair<std::string, std::string>>& text);
/// Largest derivative order of any output symbol used in the map.
int max_prime_order(const FlatnessMap& map);

struct GridSpec {
  double t0 = 0.0;
  double tf = 1.0;
  std::size_t intervals = 200;
};

/// Columns: every output and its derivatives up to the order the map uses,
/// then every map entry; all at grid points and midpoints.
TrajectoryTable synthesize_base(const FlatnessMap& map, const PolyTrajectory& traj,
                                const GridSpec& grid);

}  // namespace liouplan
