#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "liouplan/expr.hpp"
#include "liouplan/trajectory.hpp"

namespace testing_support {

using liouplan::BinaryOp;
using liouplan::Expr;
using liouplan::UnaryFn;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Any tree the printer must handle: every function, every operator, negative
/// and fractional constants, primed names, negative exponents.
inline Expr random_any_tree(std::mt19937_64& rng, int depth) {
  static const std::vector<std::string> names{"x", "y", "y'", "y'''", "u_1", "Theta2", "t"};
  if (depth <= 0 || uniform_int(rng, 0, 4) == 0) {
    switch (uniform_int(rng, 0, 3)) {
      case 0: return Expr::constant(static_cast<double>(uniform_int(rng, -9, 9)));
      case 1: return Expr::constant(uniform(rng, -1e3, 1e3));
      case 2: return Expr::constant(std::ldexp(uniform(rng, 0.5, 1.0), uniform_int(rng, -60, 60)));
      default: return Expr::variable(names[static_cast<std::size_t>(uniform_int(rng, 0, 6))]);
    }
  }
  if (uniform_int(rng, 0, 2) == 0) {
    const auto fn = static_cast<UnaryFn>(uniform_int(rng, 0, static_cast<int>(UnaryFn::Sign)));
    return Expr::unary(fn, random_any_tree(rng, depth - 1));
  }
  const auto op = static_cast<BinaryOp>(uniform_int(rng, 0, 4));
  if (op == BinaryOp::Pow) return Expr::power(random_any_tree(rng, depth - 1), uniform_int(rng, -4, 5));
  return Expr::binary(op, random_any_tree(rng, depth - 1), random_any_tree(rng, depth - 1));
}

/// Smooth, everywhere-defined expressions over `vars` (no division, no ln/sqrt),
/// bounded growth so derivatives stay well conditioned on [-1.5, 1.5].
inline Expr random_smooth_tree(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars) {
  if (depth <= 0 || uniform_int(rng, 0, 3) == 0) {
    if (uniform_int(rng, 0, 2) == 0) return Expr::constant(std::round(uniform(rng, -3.0, 3.0) * 4.0) / 4.0);
    return Expr::variable(vars[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(vars.size()) - 1))]);
  }
  switch (uniform_int(rng, 0, 8)) {
    case 0: return Expr::unary(UnaryFn::Sin, random_smooth_tree(rng, depth - 1, vars));
    case 1: return Expr::unary(UnaryFn::Cos, random_smooth_tree(rng, depth - 1, vars));
    case 2: return Expr::unary(UnaryFn::Atan, random_smooth_tree(rng, depth - 1, vars));
    case 3: return Expr::unary(UnaryFn::Tanh, random_smooth_tree(rng, depth - 1, vars));
    case 4: return Expr::power(random_smooth_tree(rng, depth - 1, vars), uniform_int(rng, 2, 3));
    case 5: return -random_smooth_tree(rng, depth - 1, vars);
    case 6: return random_smooth_tree(rng, depth - 1, vars) * random_smooth_tree(rng, depth - 1, vars);
    case 7: return random_smooth_tree(rng, depth - 1, vars) - random_smooth_tree(rng, depth - 1, vars);
    default: return random_smooth_tree(rng, depth - 1, vars) + random_smooth_tree(rng, depth - 1, vars);
  }
}

/// Grid samples of f and its midpoint samples on a table's grid.
template <typename F>
void fill_column(liouplan::TrajectoryTable& table, const std::string& name, F f) {
  std::vector<double> grid(table.points());
  std::vector<double> mid(table.intervals());
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = f(table.time(k));
  for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = f(table.mid_time(k));
  table.set_column(name, std::move(grid), std::move(mid));
}

/// Random band-limited input: a sum of three sinusoids, |u| <= amplitude.
inline void fill_random_input(liouplan::TrajectoryTable& table, const std::string& name,
                              std::mt19937_64& rng, double amplitude) {
  double a[3], w[3], ph[3];
  for (int i = 0; i < 3; ++i) {
    a[i] = uniform(rng, -amplitude, amplitude) / 3.0;
    w[i] = uniform(rng, 0.0, 6.0);
    ph[i] = uniform(rng, 0.0, 6.283185307179586);
  }
  fill_column(table, name, [=](double t) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += a[i] * std::sin(w[i] * t + ph[i]);
    return v;
  });
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing_support
