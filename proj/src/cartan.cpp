#include "liouplan/cartan.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "liouplan/errors.hpp"

namespace liouplan {

void JetSpec::validate() const {
  if (order < 0) throw InputError("jet order must be nonnegative");
  std::set<std::string> seen;
  for (const auto* list : {&states, &inputs}) {
    for (const auto& n : *list) {
      if (!is_valid_variable_name(n) || split_primes(n).second != 0 || n == "t") {
        throw InputError("invalid jet coordinate name '" + n + "'");
      }
      if (!seen.insert(n).second) throw InputError("jet coordinate '" + n + "' declared twice");
    }
  }
}

bool JetSpec::is_state(std::string_view name) const {
  return std::find(states.begin(), states.end(), name) != states.end();
}

int JetSpec::input_derivative_order(std::string_view name) const {
  auto [base, order] = split_primes(name);
  if (std::find(inputs.begin(), inputs.end(), base) == inputs.end()) return -1;
  return order;
}

bool JetSpec::is_coordinate(std::string_view name) const {
  if (name == "t" || is_state(name)) return true;
  const int k = input_derivative_order(name);
  return k >= 0 && k <= order;
}

CartanField::CartanField(JetSpec spec, std::map<std::string, Expr> rhs)
    : spec_(std::move(spec)), rhs_(std::move(rhs)) {
  spec_.validate();
  if (rhs_.size() != spec_.states.size()) {
    throw InputError("Cartan field needs exactly one rhs per state");
  }
  for (const auto& s : spec_.states) {
    auto it = rhs_.find(s);
    if (it == rhs_.end()) throw InputError("Cartan field has no rhs for '" + s + "'");
    for (const auto& v : variables(it->second)) {
      if (!spec_.is_coordinate(v)) {
        throw InputError("rhs of '" + s + "' mentions '" + v + "' outside the jet coordinates");
      }
    }
  }
}

CartanField CartanField::from_system(const SystemModel& sys, int order) {
  return CartanField(JetSpec{sys.states, sys.inputs, order}, sys.rhs);
}

const Expr& CartanField::rhs(const std::string& state) const {
  auto it = rhs_.find(state);
  if (it == rhs_.end()) throw InputError("no state named '" + state + "'");
  return it->second;
}

Expr total_derivative(const CartanField& cf, const Expr& e) {
  const JetSpec& spec = cf.spec();
  const auto vars = variables(e);
  for (const auto& v : vars) {
    if (!spec.is_coordinate(v)) {
      throw InputError("'" + v + "' is not a jet coordinate");
    }
    if (spec.input_derivative_order(v) == spec.order) {
      throw TruncationExceeded("'" + v + "' is at the truncation order " +
                               std::to_string(spec.order) +
                               "; its total derivative leaves the jet space");
    }
  }

  std::vector<Expr> terms;
  auto add_term = [&](const Expr& coefficient, const std::string& var) {
    if (!vars.count(var)) return;
    Expr partial = partial_derivative(e, var);
    if (partial.is_constant(0.0)) return;
    terms.push_back(simplify(coefficient * partial));
  };

  add_term(Expr::constant(1.0), "t");
  for (const auto& s : spec.states) add_term(cf.rhs(s), s);
  for (const auto& u : spec.inputs) {
    for (int k = 0; k < spec.order; ++k) {
      add_term(Expr::variable(with_primes(u, k + 1)), with_primes(u, k));
    }
  }

  if (terms.empty()) return Expr::constant(0.0);
  Expr sum = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) sum = sum + terms[i];
  return simplify(sum);
}

double first_integral_residual(const CartanField& cf, const Expr& theta, int n_samples,
                               const SampleBox& box, std::uint64_t seed) {
  if (n_samples < 1) throw InputError("first_integral_residual needs at least one sample");
  const Expr derivative = total_derivative(cf, theta);
  const auto names = variables(derivative);
  for (const auto& n : names) {
    if (!box.count(n)) throw InputError("sample box has no range for '" + n + "'");
  }

  std::mt19937_64 rng(seed);
  Binding point;
  double worst = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    for (const auto& n : names) {
      const auto& [lo, hi] = box.find(n)->second;
      point[n] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    try {
      worst = std::max(worst, std::fabs(evaluate(derivative, point)));
    } catch (const DomainError& err) {
      std::ostringstream where;
      where.precision(17);
      where << "sample " << k << ":";
      for (const auto& [n, v] : point) where << ' ' << n << '=' << v;
      throw DomainError(err.node(), err.value(), where.str());
    }
  }
  return worst;
}

PVForm embed_integral_as_pv(const CartanField& cf, const Expr& alpha, const std::string& xi_name) {
  const Expr a = simplify(alpha);
  if (a.is_constant(0.0)) throw ZeroAlpha("integrand of the extension is identically zero");
  const Expr growth = simplify(total_derivative(cf, a) / a);
  const Expr zero = Expr::constant(0.0);
  return PVForm({xi_name, xi_name + "_rate"},
                {{zero, Expr::constant(1.0)}, {zero, growth}});
}

}  // namespace liouplan
