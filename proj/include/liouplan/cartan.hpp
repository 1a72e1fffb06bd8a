#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "liouplan/expr.hpp"
#include "liouplan/pv_form.hpp"
#include "liouplan/system_model.hpp"

namespace liouplan {

/// Truncated jet coordinates {t, x, u, u', ..., u^(order)}.
struct JetSpec {
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  int order = kDefaultJetOrder;

  void validate() const;
  bool is_state(std::string_view name) const;
  /// Derivative order of an input jet coordinate such as `u''`, or -1.
  int input_derivative_order(std::string_view name) const;
  bool is_coordinate(std::string_view name) const;
};

/// The total time derivative along dx/dt = F(x, u) on the truncated jet space.
class CartanField {
 public:
  CartanField(JetSpec spec, std::map<std::string, Expr> rhs);
  static CartanField from_system(const SystemModel& sys, int order = kDefaultJetOrder);

  const JetSpec& spec() const noexcept { return spec_; }
  const Expr& rhs(const std::string& state) const;

 private:
  JetSpec spec_;
  std::map<std::string, Expr> rhs_;
};

/// d/dt e = de/dt + sum_j F_j de/dx_j + sum_{i,nu} u_i^(nu+1) de/du_i^(nu), simplified.
/// Throws TruncationExceeded if `e` mentions an input derivative of the top order.
Expr total_derivative(const CartanField& cf, const Expr& e);

using SampleBox = std::map<std::string, std::pair<double, double>, std::less<>>;

/// Max |total_derivative(theta)| over uniform samples in `box`. A large value
/// refutes that theta is a first integral; zero proves nothing.
double first_integral_residual(const CartanField& cf, const Expr& theta, int n_samples,
                               const SampleBox& box, std::uint64_t seed);

/// Rewrites the integral extension d(xi)/dt = alpha as the 2 x 2 linear system
/// d(xi)/dt = r, dr/dt = (alpha'/alpha) r. Start it with xi(t0) = 0, r(t0) = alpha(t0).
/// The states are named `xi_name` and `xi_name + "_rate"`.
PVForm embed_integral_as_pv(const CartanField& cf, const Expr& alpha,
                            const std::string& xi_name = "xi");

}  // namespace liouplan
