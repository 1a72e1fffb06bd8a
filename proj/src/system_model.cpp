#include "liouplan/system_model.hpp"

#include <algorithm>
#include <set>

#include "liouplan/errors.hpp"

namespace liouplan {

const Expr& SystemModel::rhs_of(const std::string& state) const {
  auto it = rhs.find(state);
  if (it == rhs.end()) throw InputError("system '" + name + "' has no rhs for '" + state + "'");
  return it->second;
}

bool SystemModel::is_state(std::string_view n) const {
  return std::find(states.begin(), states.end(), n) != states.end();
}

bool SystemModel::is_input(std::string_view n) const {
  return std::find(inputs.begin(), inputs.end(), n) != inputs.end();
}

void SystemModel::validate(int jet_order) const {
  const std::string where = "system '" + name + "': ";
  if (states.empty()) throw InputError(where + "needs at least one state");
  if (inputs.empty()) throw InputError(where + "needs at least one input");
  if (jet_order < 0) throw InputError(where + "jet order must be nonnegative");

  std::set<std::string> seen;
  for (const auto* list : {&states, &inputs}) {
    for (const auto& n : *list) {
      if (!is_valid_variable_name(n) || split_primes(n).second != 0) {
        throw InputError(where + "invalid coordinate name '" + n + "'");
      }
      if (n == "t") throw InputError(where + "'t' is reserved for time");
      if (!seen.insert(n).second) throw InputError(where + "duplicate name '" + n + "'");
    }
  }
  if (rhs.size() != states.size()) throw InputError(where + "rhs keys must equal the states");
  for (const auto& s : states) {
    const Expr& f = rhs_of(s);
    for (const auto& v : variables(f)) {
      if (v == "t" || is_state(v)) continue;
      auto [base, order] = split_primes(v);
      if (is_input(base)) {
        if (order > jet_order) {
          throw InputError(where + "rhs of '" + s + "' uses '" + v +
                           "' beyond jet order " + std::to_string(jet_order));
        }
        continue;
      }
      throw InputError(where + "rhs of '" + s + "' mentions unknown variable '" + v + "'");
    }
  }
}

SystemModel make_system(std::string name, std::vector<std::string> states,
                        std::vector<std::string> inputs,
                        const std::map<std::string, std::string>& rhs_text, int jet_order) {
  SystemModel sys{std::move(name), std::move(states), std::move(inputs), {}};
  for (const auto& [state, text] : rhs_text) {
    try {
      sys.rhs.emplace(state, parse_expression(text));
    } catch (const ParseError& e) {
      throw InputError("system '" + sys.name + "', rhs of '" + state + "': " + e.what());
    }
  }
  sys.validate(jet_order);
  return sys;
}

}  // namespace liouplan
