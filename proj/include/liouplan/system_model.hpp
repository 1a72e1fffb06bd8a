#pragma once

#include <map>
#include <string>
#include <vector>

#include "liouplan/expr.hpp"

namespace liouplan {

inline constexpr int kDefaultJetOrder = 4;

/// Explicit dynamics dx/dt = F(x, u), one expression per state.
///
/// Right-hand sides may mention `t`, states, inputs, and input derivatives
/// (`u'`, `u''`, ...) up to the jet truncation order.
struct SystemModel {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::map<std::string, Expr> rhs;

  const Expr& rhs_of(const std::string& state) const;
  bool is_state(std::string_view name) const;
  bool is_input(std::string_view name) const;

  /// Throws InputError on any violated invariant.
  void validate(int jet_order = kDefaultJetOrder) const;
};

/// Builds and validates a model from parallel name lists and expression text.
SystemModel make_system(std::string name, std::vector<std::string> states,
                        std::vector<std::string> inputs,
                        const std::map<std::string, std::string>& rhs_text,
                        int jet_order = kDefaultJetOrder);

}  // namespace liouplan
